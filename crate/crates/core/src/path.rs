//! Timed planar paths.
//!
//! A [`TimedPath`] is a piecewise-linear map `[0, t_f] -> R^2` given by its
//! samples. Lattice paths additionally remember their integer vertices, the
//! lattice mesh (points are `vertex / mesh`) and the uniform time step, so that
//! lattice-only operations stay exact.

use alloc::vec::Vec;

use crate::error::{invalid_path, Error, Result};
use crate::geom::Point;
use crate::lattice::Vertex;

/// Spatial tolerance used to decide that two continuum points coincide.
pub const POINT_TOL: f64 = 1e-9;

/// Whether a path lives on a lattice or in the continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    Continuum,
    /// Points are `vertex / mesh`, sample `i` sits at time `i * time_step`.
    Lattice {
        mesh: f64,
        time_step: f64,
    },
}

/// Exact data carried by lattice paths.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeData {
    pub mesh: f64,
    pub time_step: f64,
    pub vertices: Vec<Vertex>,
}

/// A piecewise-linear path with non-decreasing sample times starting at 0.
///
/// Repeated sample times encode jumps; evaluation is right-continuous there.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPath {
    times: Vec<f64>,
    points: Vec<Point>,
    lattice: Option<LatticeData>,
}

impl TimedPath {
    /// A continuous path from samples with strictly increasing times.
    pub fn continuum(samples: Vec<(f64, Point)>) -> Result<Self> {
        Self::build(samples, false)
    }

    /// A right-continuous path whose samples may repeat a time to encode a jump.
    pub fn with_jumps(samples: Vec<(f64, Point)>) -> Result<Self> {
        Self::build(samples, true)
    }

    fn build(samples: Vec<(f64, Point)>, jumps: bool) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid_path("a path needs at least one sample"));
        }
        if samples[0].0 != 0.0 {
            return Err(invalid_path("sample times must start at 0"));
        }
        for w in samples.windows(2) {
            let ok = if jumps { w[1].0 >= w[0].0 } else { w[1].0 > w[0].0 };
            if !ok {
                return Err(invalid_path("sample times must increase"));
            }
        }
        if samples.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(invalid_path("samples must be finite"));
        }
        let (times, points) = samples.into_iter().unzip();
        Ok(TimedPath { times, points, lattice: None })
    }

    /// A stationary path of the given duration.
    pub fn constant(p: Point, duration: f64) -> Result<Self> {
        if duration == 0.0 {
            Self::continuum(alloc::vec![(0.0, p)])
        } else {
            Self::continuum(alloc::vec![(0.0, p), (duration, p)])
        }
    }

    /// A nearest-neighbour lattice path traversed at one step per `time_step`.
    pub fn lattice(vertices: Vec<Vertex>, mesh: f64, time_step: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid_path("a lattice path needs a vertex"));
        }
        if !(mesh > 0.0 && mesh.is_finite() && time_step > 0.0 && time_step.is_finite()) {
            return Err(invalid_path("mesh and time step must be positive"));
        }
        if vertices.windows(2).any(|w| !w[0].is_adjacent(w[1])) {
            return Err(invalid_path("consecutive lattice vertices must be nearest neighbours"));
        }
        let times = (0..vertices.len()).map(|i| i as f64 * time_step).collect();
        let points = vertices.iter().map(|v| v.to_point(mesh)).collect();
        Ok(TimedPath { times, points, lattice: Some(LatticeData { mesh, time_step, vertices }) })
    }

    pub fn kind(&self) -> PathKind {
        match &self.lattice {
            Some(l) => PathKind::Lattice { mesh: l.mesh, time_step: l.time_step },
            None => PathKind::Continuum,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice.is_some()
    }

    pub fn lattice_data(&self) -> Option<&LatticeData> {
        self.lattice.as_ref()
    }

    pub fn vertices(&self) -> Option<&[Vertex]> {
        self.lattice.as_ref().map(|l| l.vertices.as_slice())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, Point)> + '_ {
        self.times.iter().copied().zip(self.points.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().unwrap()
    }

    pub fn has_jumps(&self) -> bool {
        self.times.windows(2).any(|w| w[0] == w[1])
    }

    /// `f(t)` for `t` in `[0, t_f]`.
    pub fn evaluate(&self, t: f64) -> Result<Point> {
        if !(0.0..=self.duration()).contains(&t) {
            return Err(Error::TimeOutOfRange { t, duration: self.duration() });
        }
        Ok(self.eval_clamped(t))
    }

    /// `f(t ∧ t_f)`, with negative times clamped to 0.
    pub fn eval_clamped(&self, t: f64) -> Point {
        let n = self.times.len();
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.points[0];
        }
        if k == n {
            return self.points[n - 1];
        }
        self.interpolate(k - 1, t)
    }

    /// Left limit `f(t-)`, equal to `f(t)` away from jumps.
    pub fn eval_left(&self, t: f64) -> Point {
        let n = self.times.len();
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return self.points[0];
        }
        if k == n {
            return self.points[n - 1];
        }
        self.interpolate(k - 1, t)
    }

    fn interpolate(&self, i: usize, t: f64) -> Point {
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.points[i].lerp(self.points[i + 1], s)
    }

    /// The path `a f`.
    pub fn scale_space(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(crate::error::precondition("space scale must be positive"));
        }
        match &self.lattice {
            Some(l) => Self::lattice(l.vertices.clone(), l.mesh / a, l.time_step),
            None => Self::build(self.samples().map(|(t, p)| (t, a * p)).collect(), true),
        }
    }

    /// The path `t -> f(c t)` on `[0, t_f / c]`.
    pub fn scale_time(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(crate::error::precondition("time scale must be positive"));
        }
        match &self.lattice {
            Some(l) => Self::lattice(l.vertices.clone(), l.mesh, l.time_step / c),
            None => Self::build(self.samples().map(|(t, p)| (t / c, p)).collect(), true),
        }
    }

    /// The same path with its lattice information dropped.
    pub fn to_continuum(&self) -> Self {
        TimedPath { times: self.times.clone(), points: self.points.clone(), lattice: None }
    }

    /// `f` followed by `g`; requires `f(t_f) = g(0)`.
    pub fn concat(&self, g: &TimedPath) -> Result<Self> {
        let (a, b) = (self.end(), g.start());
        let matched = match (&self.lattice, &g.lattice) {
            (Some(lf), Some(lg)) if lf.mesh == lg.mesh => lf.vertices.last() == lg.vertices.first(),
            _ => close(a, b),
        };
        if !matched {
            return Err(Error::EndpointMismatch { ax: a.x, ay: a.y, bx: b.x, by: b.y });
        }
        if let (Some(lf), Some(lg)) = (&self.lattice, &g.lattice) {
            if lf.mesh == lg.mesh && lf.time_step == lg.time_step {
                let mut v = lf.vertices.clone();
                v.extend_from_slice(&lg.vertices[1..]);
                return Self::lattice(v, lf.mesh, lf.time_step);
            }
        }
        let shift = self.duration();
        let mut samples: Vec<(f64, Point)> = self.samples().collect();
        samples.extend(g.samples().skip(1).map(|(t, p)| (shift + t, p)));
        Self::build(samples, self.has_jumps() || g.has_jumps())
    }

    /// Chronological loop erasure of a lattice path.
    pub fn loop_erase(&self) -> Result<Vec<Vertex>> {
        let l = self.lattice.as_ref().ok_or_else(|| invalid_path("loop erasure needs a lattice path"))?;
        Ok(crate::lattice::loop_erase(&l.vertices))
    }

    /// `sup_t |f(t ∧ t_f) - g(t ∧ t_g)|` without the duration term.
    pub fn sup_distance(&self, g: &TimedPath) -> f64 {
        let mut grid: Vec<f64> = Vec::with_capacity(self.len() + g.len());
        grid.extend_from_slice(&self.times);
        grid.extend_from_slice(&g.times);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let jumps = self.has_jumps() || g.has_jumps();
        let mut best: f64 = 0.0;
        for &t in &grid {
            best = best.max(self.eval_clamped(t).dist(g.eval_clamped(t)));
            if jumps {
                best = best.max(self.eval_left(t).dist(g.eval_left(t)));
            }
        }
        best
    }

    /// Modulus of continuity `sup { |f(t) - f(s)| : |t - s| <= delta }`.
    pub fn modulus(&self, delta: f64) -> f64 {
        modulus_of(&self.times, &self.points, delta, |a, b| a.dist(b), |a, b, s| a.lerp(b, s))
    }

    /// `sup |f(s) - f(t)|` over all sample pairs.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.max(p.dist(*q));
            }
        }
        best
    }
}

fn close(a: Point, b: Point) -> bool {
    a.dist(b) <= POINT_TOL * (1.0 + a.norm().max(b.norm()))
}

/// `d_inf(f, g) = |t_f - t_g| + sup_t |f(t ∧ t_f) - g(t ∧ t_g)|`.
///
/// The difference of two piecewise-linear paths is affine between
/// consecutive points of the merged sample grid, so the supremum is attained
/// on that grid and the value is exact.
pub fn d_inf(f: &TimedPath, g: &TimedPath) -> f64 {
    (f.duration() - g.duration()).abs() + f.sup_distance(g)
}

/// Exact modulus of continuity of a piecewise-linear function.
///
/// On each pair of linear pieces `|f(t) - f(s)|` is convex in `(s, t)`, so the
/// supremum over the band `|t - s| <= delta` is attained at sample pairs or at
/// pairs `(t_i, t_i ± delta)`.
pub fn modulus_of<T: Copy>(
    times: &[f64],
    vals: &[T],
    delta: f64,
    dist: impl Fn(T, T) -> f64,
    lerp: impl Fn(T, T, f64) -> T,
) -> f64 {
    let n = times.len();
    if n < 2 || delta.is_nan() {
        return 0.0;
    }
    let delta = delta.max(0.0);
    let end = times[n - 1];
    let at = |k: usize, t: f64| -> T {
        // k is the first index with times[k] > t, 1 <= k < n
        let (t0, t1) = (times[k - 1], times[k]);
        lerp(vals[k - 1], vals[k], ((t - t0) / (t1 - t0)).clamp(0.0, 1.0))
    };
    let mut best: f64 = 0.0;
    let mut back = 0usize;
    for i in 0..n {
        let ti = times[i];
        let mut j = i + 1;
        while j < n && times[j] - ti <= delta {
            best = best.max(dist(vals[i], vals[j]));
            j += 1;
        }
        let fwd = ti + delta;
        if fwd < end && j < n && j > 0 && times[j - 1] <= fwd {
            best = best.max(dist(vals[i], at(j, fwd)));
        }
        let bwd = ti - delta;
        if bwd > 0.0 {
            while back < n && times[back] <= bwd {
                back += 1;
            }
            if back > 0 && back < n {
                best = best.max(dist(vals[i], at(back, bwd)));
            }
        }
    }
    best
}

/// Modulus of continuity of a scalar piecewise-linear function.
pub fn scalar_modulus(times: &[f64], values: &[f64], delta: f64) -> f64 {
    modulus_of(times, values, delta, |a, b| (a - b).abs(), |a, b, s| a + s * (b - a))
}

/// A closed timed path `l(0) = l(t_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop(TimedPath);

impl Loop {
    pub fn new(path: TimedPath) -> Result<Self> {
        let closed = match &path.lattice {
            Some(l) => l.vertices.first() == l.vertices.last(),
            None => close(path.start(), path.end()),
        };
        if !closed {
            return Err(invalid_path("a loop must end where it starts"));
        }
        Ok(Loop(path))
    }

    /// A lattice loop; the vertex list must start and end at the root.
    pub fn lattice(vertices: Vec<Vertex>, mesh: f64, time_step: f64) -> Result<Self> {
        if !(vertices.len() - 1).is_multiple_of(2) {
            return Err(invalid_path("lattice loops have even length"));
        }
        Self::new(TimedPath::lattice(vertices, mesh, time_step)?)
    }

    pub fn path(&self) -> &TimedPath {
        &self.0
    }

    pub fn into_path(self) -> TimedPath {
        self.0
    }

    pub fn duration(&self) -> f64 {
        self.0.duration()
    }

    /// Number of lattice steps, if this is a lattice loop.
    pub fn steps(&self) -> Option<usize> {
        self.0.vertices().map(|v| v.len() - 1)
    }

    /// The rerooted loop `t -> l(t + theta mod t_l)`.
    pub fn reroot(&self, theta: f64) -> Result<Self> {
        let d = self.duration();
        if !(0.0..=d).contains(&theta) {
            return Err(Error::TimeOutOfRange { t: theta, duration: d });
        }
        if theta == 0.0 || theta == d {
            return Ok(self.clone());
        }
        if let Some(l) = &self.0.lattice {
            let idx = theta / l.time_step;
            let k = libm::round(idx);
            if (idx - k).abs() <= 1e-9 * (1.0 + idx) {
                return Ok(self.reroot_index(k as usize));
            }
        }
        let p = &self.0;
        let mut s: Vec<(f64, Point)> = Vec::with_capacity(p.len() + 2);
        s.push((0.0, p.eval_clamped(theta)));
        for (t, q) in p.samples() {
            if t > theta {
                s.push((t - theta, q));
            }
        }
        for (t, q) in p.samples().skip(1) {
            if t < theta {
                s.push((d - theta + t, q));
            }
        }
        s.push((d, p.eval_clamped(theta)));
        s.dedup_by(|b, a| b.0 <= a.0);
        Loop::new(TimedPath::build(s, false)?)
    }

    /// Reroot a lattice loop at sample index `k`.
    pub fn reroot_index(&self, k: usize) -> Self {
        let l = self.0.lattice.as_ref().expect("lattice loop");
        let n = l.vertices.len() - 1;
        let k = k % n.max(1);
        let mut v: Vec<Vertex> = Vec::with_capacity(n + 1);
        v.extend_from_slice(&l.vertices[k..n]);
        v.extend_from_slice(&l.vertices[..=k]);
        Loop(TimedPath::lattice(v, l.mesh, l.time_step).expect("rotation of a valid loop"))
    }

    /// `sup { |l(t) - l(s)| : |t - s| <= delta }` with `l` extended periodically.
    pub fn periodic_modulus(&self, delta: f64) -> f64 {
        let d = self.duration();
        if d == 0.0 {
            return 0.0;
        }
        if delta >= d {
            return self.0.diameter();
        }
        let p = &self.0;
        let mut times: Vec<f64> = p.times.clone();
        let mut pts: Vec<Point> = p.points.clone();
        for (t, q) in p.samples().skip(1) {
            times.push(d + t);
            pts.push(q);
        }
        modulus_of(&times, &pts, delta, |a, b| a.dist(b), |a, b, s| a.lerp(b, s))
    }

    pub fn scale_space(&self, a: f64) -> Result<Self> {
        Ok(Loop(self.0.scale_space(a)?))
    }

    pub fn scale_time(&self, c: f64) -> Result<Self> {
        Ok(Loop(self.0.scale_time(c)?))
    }
}

/// An injective timed path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePath(TimedPath);

impl SimplePath {
    /// Lattice paths must visit distinct vertices; continuum paths must have
    /// distinct sample points.
    pub fn new(path: TimedPath) -> Result<Self> {
        let simple = match &path.lattice {
            Some(l) => {
                let mut v = l.vertices.clone();
                v.sort_unstable();
                v.windows(2).all(|w| w[0] != w[1])
            }
            None => {
                let mut pts: Vec<Point> = path.points.clone();
                pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
                pts.windows(2).all(|w| w[0] != w[1])
            }
        };
        if !simple {
            return Err(invalid_path("a simple path must not revisit a point"));
        }
        Ok(SimplePath(path))
    }

    pub fn path(&self) -> &TimedPath {
        &self.0
    }

    pub fn duration(&self) -> f64 {
        self.0.duration()
    }
}
