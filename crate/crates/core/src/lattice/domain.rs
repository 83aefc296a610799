use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Vertex, STEPS};
use crate::error::{Error, Result};
use crate::geom::Point;

const ABSENT: u32 = u32::MAX;

/// A finite connected set of lattice vertices containing the origin.
///
/// Edges of the domain are the nearest-neighbour edges of `Z^2` with both
/// endpoints in the set. Membership is an O(1) lookup in a dense index over
/// the bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDomain {
    mesh: f64,
    min: Vertex,
    width: usize,
    height: usize,
    index: Vec<u32>,
    vertices: Vec<Vertex>,
}

impl LatticeDomain {
    /// The `w x h` box of `Z^2` centred at the origin (for odd sides the
    /// box is symmetric, e.g. `3 x 3` is `{-1, 0, 1}^2`).
    pub fn from_box(w: usize, h: usize) -> Result<Self> {
        Self::from_box_mesh(w, h, 1.0)
    }

    pub fn from_box_mesh(w: usize, h: usize, mesh: f64) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::InvalidDomain("box sides must be positive".into()));
        }
        let x0 = -(((w - 1) / 2) as i32);
        let y0 = -(((h - 1) / 2) as i32);
        let mut vs = Vec::with_capacity(w * h);
        for j in 0..h as i32 {
            for i in 0..w as i32 {
                vs.push(Vertex::new(x0 + i, y0 + j));
            }
        }
        Self::from_vertices(&vs, mesh)
    }

    /// The component of the origin in an explicit vertex set.
    pub fn from_vertices(vs: &[Vertex], mesh: f64) -> Result<Self> {
        if !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::InvalidDomain("mesh must be positive".into()));
        }
        if !vs.contains(&Vertex::ORIGIN) {
            return Err(Error::InvalidDomain("the domain must contain the origin".into()));
        }
        let min = Vertex::new(vs.iter().map(|v| v.x).min().unwrap(), vs.iter().map(|v| v.y).min().unwrap());
        let width = (vs.iter().map(|v| v.x).max().unwrap() - min.x + 1) as usize;
        let height = (vs.iter().map(|v| v.y).max().unwrap() - min.y + 1) as usize;
        let mut mask = vec![false; width * height];
        for v in vs {
            mask[(v.y - min.y) as usize * width + (v.x - min.x) as usize] = true;
        }
        let cell = |v: Vertex| -> Option<usize> {
            let (dx, dy) = (v.x - min.x, v.y - min.y);
            (dx >= 0 && dy >= 0 && (dx as usize) < width && (dy as usize) < height)
                .then(|| dy as usize * width + dx as usize)
        };
        // breadth-first search from the origin
        let mut seen = vec![false; width * height];
        let mut queue = VecDeque::new();
        let o = cell(Vertex::ORIGIN).unwrap();
        seen[o] = true;
        queue.push_back(Vertex::ORIGIN);
        while let Some(v) = queue.pop_front() {
            for d in 0..4 {
                let w = v.step(d);
                if let Some(c) = cell(w) {
                    if mask[c] && !seen[c] {
                        seen[c] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut index = vec![ABSENT; width * height];
        let mut vertices = Vec::new();
        for c in 0..width * height {
            if seen[c] {
                index[c] = vertices.len() as u32;
                vertices.push(Vertex::new(min.x + (c % width) as i32, min.y + (c / width) as i32));
            }
        }
        Ok(LatticeDomain { mesh, min, width, height, index, vertices })
    }

    /// Discretise an open simple polygon `D` containing the origin at mesh `n`:
    /// a vertex `w` of `Z^2` is kept when the open ball of radius `1/2` about
    /// `w` lies in `n D`, and the component of the origin is returned.
    ///
    /// All containment and distance tests are carried out exactly on the
    /// binary expansions of the coordinates.
    pub fn from_polygon(polygon: &[Point], mesh: f64) -> Result<Self> {
        if polygon.len() < 3 {
            return Err(Error::InvalidDomain("a polygon needs at least three corners".into()));
        }
        if polygon.iter().any(|p| !p.is_finite()) || !(mesh > 0.0 && mesh.is_finite()) {
            return Err(Error::InvalidDomain("polygon corners and mesh must be finite".into()));
        }
        let exact = ExactPolygon::new(polygon, mesh);
        if !exact.ball_inside(Vertex::ORIGIN) {
            return Err(Error::InvalidDomain(format!(
                "the origin is not an interior vertex of the polygon at mesh {mesh}"
            )));
        }
        let xs = polygon.iter().map(|p| p.x * mesh);
        let ys = polygon.iter().map(|p| p.y * mesh);
        let lo_x = libm::floor(xs.clone().fold(f64::INFINITY, f64::min)) as i64 - 1;
        let hi_x = libm::ceil(xs.fold(f64::NEG_INFINITY, f64::max)) as i64 + 1;
        let lo_y = libm::floor(ys.clone().fold(f64::INFINITY, f64::min)) as i64 - 1;
        let hi_y = libm::ceil(ys.fold(f64::NEG_INFINITY, f64::max)) as i64 + 1;
        if (hi_x - lo_x + 1) * (hi_y - lo_y + 1) > 64_000_000 {
            return Err(Error::InvalidDomain("polygon too large for this mesh".into()));
        }
        let mut vs = Vec::new();
        for y in lo_y..=hi_y {
            for x in lo_x..=hi_x {
                let v = Vertex::new(x as i32, y as i32);
                if exact.ball_inside(v) {
                    vs.push(v);
                }
            }
        }
        Self::from_vertices(&vs, mesh)
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of `v` in [`vertices`](Self::vertices).
    #[inline]
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        let (dx, dy) = (v.x - self.min.x, v.y - self.min.y);
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            return None;
        }
        let i = self.index[dy as usize * self.width + dx as usize];
        (i != ABSENT).then_some(i as usize)
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn contains_edge(&self, a: Vertex, b: Vertex) -> bool {
        a.is_adjacent(b) && self.contains(a) && self.contains(b)
    }

    /// Indices of the in-domain neighbours of the vertex with index `i`.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let v = self.vertices[i];
        STEPS.iter().filter_map(move |d| self.index_of(Vertex::new(v.x + d.x, v.y + d.y)))
    }

    /// Lower-left corner and side lengths of the bounding box.
    pub fn bbox(&self) -> (Vertex, usize, usize) {
        (self.min, self.width, self.height)
    }

    /// Side lengths when the domain is a full rectangle.
    pub fn rectangle(&self) -> Option<(usize, usize)> {
        (self.vertices.len() == self.width * self.height).then_some((self.width, self.height))
    }

    /// Vertices outside the domain adjacent to it, in a fixed order.
    pub fn exterior_boundary(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = Vec::new();
        for v in &self.vertices {
            for d in 0..4 {
                let w = v.step(d);
                if !self.contains(w) {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A polygon whose scaled corners are stored as exact integers over a
/// common power of two.
struct ExactPolygon {
    corners: Vec<(BigInt, BigInt)>,
    /// Coordinates are `value * 2^exp`.
    exp: i32,
}

fn decode(v: f64) -> (BigInt, i32) {
    if v == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let e = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
    (BigInt::from(sign * m as i64), e)
}

impl ExactPolygon {
    fn new(polygon: &[Point], mesh: f64) -> Self {
        let (mn, en) = decode(mesh);
        let raw: Vec<((BigInt, i32), (BigInt, i32))> = polygon
            .iter()
            .map(|p| {
                let (mx, ex) = decode(p.x);
                let (my, ey) = decode(p.y);
                ((&mx * &mn, ex + en), (&my * &mn, ey + en))
            })
            .collect();
        // exponent -1 keeps the radius 1/2 integral after scaling
        let exp = raw.iter().flat_map(|(a, b)| [a.1, b.1]).fold(-1, i32::min);
        let lift = |(m, e): &(BigInt, i32)| -> BigInt { m << ((e - exp) as usize) };
        let corners = raw.iter().map(|(a, b)| (lift(a), lift(b))).collect();
        ExactPolygon { corners, exp }
    }

    fn lift_int(&self, k: i32) -> BigInt {
        BigInt::from(k) << ((-self.exp) as usize)
    }

    /// True when the open ball of radius 1/2 about `v` lies inside the polygon.
    fn ball_inside(&self, v: Vertex) -> bool {
        let px = self.lift_int(v.x);
        let py = self.lift_int(v.y);
        // (1/2)^2 in scaled units: 2^(-2 exp - 2)
        let quarter = BigInt::from(1) << ((-2 * self.exp - 2) as usize);
        let n = self.corners.len();
        let mut winding = 0i32;
        for i in 0..n {
            let (ax, ay) = &self.corners[i];
            let (bx, by) = &self.corners[(i + 1) % n];
            let abx = bx - ax;
            let aby = by - ay;
            let avx = &px - ax;
            let avy = &py - ay;
            let cross = &abx * &avy - &aby * &avx;
            // distance from v to the edge must be at least 1/2
            let dot = &abx * &avx + &aby * &avy;
            let len2 = &abx * &abx + &aby * &aby;
            let far = if dot <= BigInt::zero() || len2.is_zero() {
                &avx * &avx + &avy * &avy >= quarter
            } else if dot >= len2 {
                let bvx = &px - bx;
                let bvy = &py - by;
                &bvx * &bvx + &bvy * &bvy >= quarter
            } else {
                &cross * &cross >= &quarter * &len2
            };
            if !far {
                return false;
            }
            if *ay <= py && *by > py && cross > BigInt::zero() {
                winding += 1;
            } else if *by <= py && *ay > py && cross < BigInt::zero() {
                winding -= 1;
            }
        }
        winding != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centred_boxes() {
        let d = LatticeDomain::from_box(3, 3).unwrap();
        assert_eq!(d.len(), 9);
        for x in -1..=1 {
            for y in -1..=1 {
                assert!(d.contains(Vertex::new(x, y)));
            }
        }
        assert!(!d.contains(Vertex::new(2, 0)));
        assert_eq!(d.rectangle(), Some((3, 3)));
        assert_eq!(d.exterior_boundary().len(), 12);
    }

    #[test]
    fn square_polygon_matches_half_cell_rule() {
        // B(w, 1/2) inside (-n, n)^2 iff |w_i| <= n - 1/2, i.e. |w_i| <= n - 1
        let sq = [Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)];
        for n in [1usize, 2, 5, 8] {
            let d = LatticeDomain::from_polygon(&sq, n as f64).unwrap();
            assert_eq!(d.len(), (2 * n - 1).pow(2), "n = {n}");
            assert_eq!(d.rectangle(), Some((2 * n - 1, 2 * n - 1)));
        }
    }

    #[test]
    fn boundary_tangency_is_exact() {
        // at mesh 2 the vertex (1,0) has distance exactly 1/2 to x = 1.5/2*2
        let sq = [Point::new(-0.75, -0.75), Point::new(0.75, -0.75), Point::new(0.75, 0.75), Point::new(-0.75, 0.75)];
        let d = LatticeDomain::from_polygon(&sq, 2.0).unwrap();
        // n D = (-1.5, 1.5)^2, so |w_i| <= 1 exactly on the tangency
        assert_eq!(d.len(), 9);
    }

    #[test]
    fn nonconvex_polygon_keeps_origin_component() {
        // an L-shape; clockwise orientation must work too
        let l = [
            Point::new(-1.0, -1.0),
            Point::new(-1.0, 3.0),
            Point::new(1.0, 3.0),
            Point::new(1.0, 1.0),
            Point::new(3.0, 1.0),
            Point::new(3.0, -1.0),
        ];
        let d = LatticeDomain::from_polygon(&l, 1.0).unwrap();
        let mut want: Vec<Vertex> =
            [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)].iter().map(|&(x, y)| Vertex::new(x, y)).collect();
        want.sort_unstable_by_key(|v| (v.y, v.x));
        assert_eq!(d.vertices(), want.as_slice());
    }

    #[test]
    fn origin_must_be_interior() {
        let tri = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(LatticeDomain::from_polygon(&tri, 1.0).is_err());
    }

    #[test]
    fn explicit_sets_keep_the_origin_component() {
        let vs = [Vertex::new(0, 0), Vertex::new(1, 0), Vertex::new(3, 0)];
        let d = LatticeDomain::from_vertices(&vs, 1.0).unwrap();
        assert_eq!(d.len(), 2);
        assert!(!d.contains(Vertex::new(3, 0)));
    }
}
