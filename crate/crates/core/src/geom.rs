//! Planar points and segment predicates.

use core::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// `self + s (other - self)`.
    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(self.x + s * (other.x - self.x), self.y + s * (other.y - self.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of_points(points: &[Point]) -> Option<BBox> {
        let first = *points.first()?;
        let mut b = BBox { min: first, max: first };
        for p in &points[1..] {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn segment(a: Point, b: Point) -> BBox {
        BBox { min: Point::new(a.x.min(b.x), a.y.min(b.y)), max: Point::new(a.x.max(b.x), a.y.max(b.y)) }
    }

    pub fn overlaps(&self, other: &BBox, pad: f64) -> bool {
        self.min.x <= other.max.x + pad
            && other.min.x <= self.max.x + pad
            && self.min.y <= other.max.y + pad
            && other.min.y <= self.max.y + pad
    }
}

/// Result of intersecting segment `p0 p1` with segment `q0 q1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentHit {
    /// Smallest parameter `u` in `[0, 1]` along `p0 p1` of a common point.
    pub u: f64,
    /// True when the decision was within the rounding guard band.
    pub ambiguous: bool,
}

/// Earliest common point of two closed segments, measured along the first.
///
/// Orientation values with magnitude below `guard * scale` are treated as
/// zero; such decisions are flagged ambiguous.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point, guard: f64) -> Option<SegmentHit> {
    let r = p1 - p0;
    let s = q1 - q0;
    let scale = (r.norm_sq() + s.norm_sq()).max(f64::MIN_POSITIVE);
    let tol = guard * scale;
    let o1 = r.cross(q0 - p0);
    let o2 = r.cross(q1 - p0);
    let o3 = s.cross(p0 - q0);
    let o4 = s.cross(p1 - q0);
    let near = |o: f64| o.abs() <= tol;
    let ambiguous = near(o1) || near(o2) || near(o3) || near(o4);
    let sgn = |o: f64| {
        if near(o) {
            0
        } else if o > 0.0 {
            1
        } else {
            -1
        }
    };
    let (s1, s2, s3, s4) = (sgn(o1), sgn(o2), sgn(o3), sgn(o4));
    if s1 * s2 > 0 || s3 * s4 > 0 {
        return None;
    }
    let denom = r.cross(s);
    if !near(denom) && !(s1 == 0 && s2 == 0) {
        let u = ((q0 - p0).cross(s) / denom).clamp(0.0, 1.0);
        return Some(SegmentHit { u, ambiguous });
    }
    // Collinear (or degenerate) segments: project onto the first segment.
    let rr = r.norm_sq();
    if rr == 0.0 {
        let ss = s.norm_sq();
        let v = if ss == 0.0 { 0.0 } else { ((p0 - q0).dot(s) / ss).clamp(0.0, 1.0) };
        let d = (q0.lerp(q1, v) - p0).norm_sq();
        return (d <= tol.max(guard)).then_some(SegmentHit { u: 0.0, ambiguous: true });
    }
    let a = (q0 - p0).dot(r) / rr;
    let b = (q1 - p0).dot(r) / rr;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi < 0.0 || lo > 1.0 {
        return None;
    }
    let u = lo.max(0.0);
    let gap = (p0.lerp(p1, u) - closest_on_segment(p0.lerp(p1, u), q0, q1)).norm_sq();
    (gap <= tol.max(guard * guard)).then_some(SegmentHit { u, ambiguous: true })
}

/// Closest point of the segment `a b` to `p`, with its parameter.
pub fn closest_param(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len = ab.norm_sq();
    if len == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len).clamp(0.0, 1.0)
    }
}

pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    a.lerp(b, closest_param(p, a, b))
}
