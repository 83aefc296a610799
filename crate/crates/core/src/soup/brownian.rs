//! Discretised Brownian loop soups in a polygon.
//!
//! The Brownian loop measure is `(2 pi t^2)^{-1} P_{t,x,x} dx dt`, with
//! `P_{t,x,x}` the law of a planar Brownian bridge of duration `t` from `x` to
//! `x` (covariance `t I` at time `t` for the free motion). Restricted to
//! durations `t >= tmin` and roots in a box of area `|A|`, it has mass
//! `|A| / (2 pi tmin)`; roots are uniform and `t = tmin / U`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{LoopSoup, SoupMeta, SoupSource};
use crate::error::{precondition, Error, Result};
use crate::geom::{BBox, Point};
use crate::path::{Loop, TimedPath};

/// Strict point-in-polygon test by winding number.
pub fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let n = polygon.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let c = (b - a).cross(p - a);
        if a.y <= p.y && b.y > p.y && c > 0.0 {
            winding += 1;
        } else if b.y <= p.y && a.y > p.y && c < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// Sampler of the Brownian loop soup in a polygon, cut off below `tmin`.
#[derive(Debug, Clone)]
pub struct BrownianSoupSampler {
    polygon: Vec<Point>,
    bbox: BBox,
    tmin: f64,
    bridge_step: f64,
    mean: f64,
    candidates: Poisson<f64>,
}

impl BrownianSoupSampler {
    pub fn new(polygon: &[Point], tmin: f64, bridge_step: f64) -> Result<Self> {
        if polygon.len() < 3 {
            return Err(Error::InvalidDomain("a polygon needs at least three corners".into()));
        }
        if !(tmin > 0.0 && bridge_step > 0.0 && tmin.is_finite() && bridge_step.is_finite()) {
            return Err(precondition("tmin and bridge step must be positive"));
        }
        let bbox = BBox::of_points(polygon).unwrap();
        let area = (bbox.max.x - bbox.min.x) * (bbox.max.y - bbox.min.y);
        if !(area > 0.0) {
            return Err(Error::InvalidDomain("degenerate polygon".into()));
        }
        let mean = area / (2.0 * core::f64::consts::PI * tmin);
        let candidates = Poisson::new(mean).map_err(|_| precondition("candidate mean out of range"))?;
        Ok(BrownianSoupSampler { polygon: polygon.to_vec(), bbox, tmin, bridge_step, mean, candidates })
    }

    /// Expected number of candidate loops, `area(bbox) / (2 pi tmin)`.
    pub fn candidate_mean(&self) -> f64 {
        self.mean
    }

    pub fn meta(&self) -> SoupMeta {
        SoupMeta {
            source: SoupSource::Brownian,
            domain_mesh: None,
            max_len: None,
            tmin: Some(self.tmin),
            bridge_step: Some(self.bridge_step),
            mass: None,
            truncated_mass: None,
            truncated_mass_is_bound: false,
        }
    }

    /// A discretised bridge from `x` to `x` of duration `t`, or `None` when a
    /// sample point leaves the polygon.
    fn bridge<R: Rng + ?Sized>(&self, x: Point, t: f64, rng: &mut R) -> Option<Vec<(f64, Point)>> {
        let steps = libm::ceil(t / self.bridge_step).max(2.0);
        let dt = t / steps;
        let m = steps as u64;
        let mut out = Vec::new();
        out.push((0.0, x));
        let mut y = x;
        for i in 1..m {
            let s = (i - 1) as f64 * dt;
            let r = t - s;
            let mean = y.lerp(x, dt / r);
            let sd = libm::sqrt(dt * (r - dt) / r);
            let z = Point::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            y = mean + sd * z;
            if !point_in_polygon(y, &self.polygon) {
                return None;
            }
            out.push((i as f64 * dt, y));
        }
        out.push((t, x));
        Some(out)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LoopSoup {
        let count = self.candidates.sample(rng) as u64;
        let mut loops = Vec::new();
        for _ in 0..count {
            let x = Point::new(
                self.bbox.min.x + (self.bbox.max.x - self.bbox.min.x) * rng.random::<f64>(),
                self.bbox.min.y + (self.bbox.max.y - self.bbox.min.y) * rng.random::<f64>(),
            );
            let u: f64 = 1.0 - rng.random::<f64>();
            let t = self.tmin / u;
            if !point_in_polygon(x, &self.polygon) {
                continue;
            }
            if let Some(samples) = self.bridge(x, t, rng) {
                let path = TimedPath::continuum(samples).expect("increasing bridge times");
                loops.push(Loop::new(path).expect("bridge returns to its root"));
            }
        }
        LoopSoup { loops, meta: self.meta() }
    }
}

/// One draw of the Brownian loop soup in `polygon` with durations `>= tmin`.
pub fn sample_brownian_soup<R: Rng + ?Sized>(
    polygon: &[Point],
    tmin: f64,
    bridge_step: f64,
    rng: &mut R,
) -> Result<LoopSoup> {
    Ok(BrownianSoupSampler::new(polygon, tmin, bridge_step)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn square() -> [Point; 4] {
        [Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)]
    }

    #[test]
    fn loops_are_closed_contained_and_long_enough() {
        let mut rng = rng_from_seed(8);
        let soup = sample_brownian_soup(&square(), 0.01, 0.001, &mut rng).unwrap();
        assert!(!soup.is_empty());
        for l in &soup.loops {
            assert!(l.duration() >= 0.01);
            assert_eq!(l.path().start(), l.path().end());
            assert!(l.path().points().iter().all(|p| point_in_polygon(*p, &square())));
        }
        assert_eq!(soup.meta.truncated_mass, None);
    }

    #[test]
    fn small_loop_count_matches_measure() {
        // loops of duration in [tmin, 2 tmin] that are tiny compared to the
        // square are almost never rejected: mean count ~ area / (4 pi tmin)
        let tmin = 1e-4;
        let mut total = 0usize;
        let reps = 40;
        for s in 0..reps {
            let soup = sample_brownian_soup(&square(), tmin, 1e-4, &mut rng_from_seed(s)).unwrap();
            total += soup.loops.iter().filter(|l| l.duration() <= 2.0 * tmin).count();
        }
        let mean = total as f64 / reps as f64;
        let want = 4.0 / (4.0 * core::f64::consts::PI * tmin);
        // boundary rejections cost at most a few percent
        assert!(mean < want * 1.02 && mean > want * 0.95, "{mean} vs {want}");
    }

    #[test]
    fn polygon_test() {
        assert!(point_in_polygon(Point::ORIGIN, &square()));
        assert!(!point_in_polygon(Point::new(1.5, 0.0), &square()));
    }
}
