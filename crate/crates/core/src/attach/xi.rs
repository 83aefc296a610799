//! The attachment map: loops hit by `gamma` are inserted, rerooted at their
//! chosen root, at their first-hit points in the order given by the
//! tie-break, while `gamma` itself is run at speed `1 / lambda` in between.
//!
//! With `T_l = sum_{l' before l} t_{l'} + lambda sigma_l`, the result `X` equals
//! the rerooted loop `l^(t - T_l)` on `(T_l, T_l + t_l)` and `gamma(sigma(t))`
//! elsewhere, where `sigma` is constant on the loop intervals and linear in
//! between.

use alloc::vec::Vec;

use super::tiebreak::TieBreak;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::lattice::Vertex;
use crate::path::{scalar_modulus, Loop, TimedPath};
use crate::soup::Configuration;

/// Options of [`attach`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttachOptions {
    /// Accept `lambda = 0` even when consecutive first-hit times are far
    /// apart; the output then jumps along `gamma`.
    pub allow_jumps: bool,
    /// Largest gap between consecutive first-hit times (with 0 and `t_gamma`)
    /// for which `lambda = 0` is accepted without `allow_jumps`.
    pub density_tol: f64,
}

impl Default for AttachOptions {
    fn default() -> Self {
        AttachOptions { allow_jumps: false, density_tol: 1e-9 }
    }
}

/// The time change `sigma` as a piecewise-linear function.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SigmaPath {
    /// Right-continuous evaluation, clamped to the time range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.times.len();
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == n {
            return self.values[n - 1];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.values[k - 1] + s * (self.values[k] - self.values[k - 1])
    }

    pub fn modulus(&self, delta: f64) -> f64 {
        scalar_modulus(&self.times, &self.values, delta)
    }
}

/// Where one loop sits on the clock of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachEntry {
    pub hit: usize,
    pub loop_index: usize,
    pub sigma: f64,
    /// Root time used for rerooting.
    pub theta: f64,
    /// `T_l`.
    pub start: f64,
    /// `T_l + t_l`.
    pub end: f64,
}

/// A jump of `X`, only produced when `lambda = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub from: Point,
    pub to: Point,
}

/// Output of [`attach`].
#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentResult {
    pub path: TimedPath,
    pub sigma: SigmaPath,
    /// One entry per hit loop, in attachment order.
    pub reach: Vec<ReachEntry>,
    /// `t_{X,lambda} = sum t_l + lambda t_gamma`.
    pub total_time: f64,
    pub lambda: f64,
    pub jumps: Vec<Jump>,
}

struct Builder {
    samples: Vec<(f64, Point, Option<Vertex>)>,
}

impl Builder {
    fn push(&mut self, t: f64, p: Point, v: Option<Vertex>) {
        if let Some(&(lt, lp, _)) = self.samples.last() {
            if t < lt || (t == lt && p == lp) {
                return;
            }
        }
        self.samples.push((t, p, v));
    }
}

fn lattice_vertex(path: &TimedPath, i: usize) -> Option<Vertex> {
    path.vertices().map(|v| v[i])
}

/// Build `X = Xi(gamma, L, lambda, B)` for a configuration.
pub fn attach(cfg: &Configuration, lambda: f64, b: &TieBreak, opts: AttachOptions) -> Result<AttachmentResult> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(crate::error::precondition("lambda must be non-negative"));
    }
    b.validate(cfg)?;
    let g = cfg.gamma();
    let hits = cfg.hits();
    let t_gamma = g.duration();
    if lambda == 0.0 && !opts.allow_jumps {
        let gap = density_gap(cfg, 0.0);
        if gap > opts.density_tol {
            return Err(Error::ZeroSpeedRegime { gap });
        }
    }
    let gt = g.times();
    let gp = g.points();
    let mut out = Builder { samples: Vec::new() };
    let mut st: Vec<f64> = alloc::vec![0.0];
    let mut sv: Vec<f64> = alloc::vec![0.0];
    let mut reach = Vec::with_capacity(hits.len());
    let mut jumps = Vec::new();
    out.push(0.0, gp[0], lattice_vertex(g, 0));

    let mut prefix = 0.0f64;
    let mut cur = 0.0f64;
    // first gamma sample strictly after `cur`
    let mut next_idx = 1usize;
    let push_gap = |out: &mut Builder,
                    st: &mut Vec<f64>,
                    sv: &mut Vec<f64>,
                    jumps: &mut Vec<Jump>,
                    prefix: f64,
                    cur: f64,
                    next_idx: &mut usize,
                    to: f64,
                    to_point: Point,
                    to_vertex: Option<Vertex>| {
        if to > cur {
            let at = prefix + lambda * to;
            if lambda > 0.0 {
                while *next_idx < gt.len() && gt[*next_idx] < to {
                    out.push(prefix + lambda * gt[*next_idx], gp[*next_idx], lattice_vertex(g, *next_idx));
                    *next_idx += 1;
                }
            } else {
                jumps.push(Jump { time: at, from: g.eval_clamped(cur), to: to_point });
                st.push(at);
                sv.push(cur);
            }
            out.push(at, to_point, to_vertex);
            st.push(at);
            sv.push(to);
        }
        while *next_idx < gt.len() && gt[*next_idx] <= to {
            *next_idx += 1;
        }
    };

    for &h in &b.order {
        let hit = &hits[h];
        let l = cfg.hit_loop(h);
        let theta = hit.roots[b.roots[h]];
        let hv = hit.gamma_index.and_then(|i| lattice_vertex(g, i));
        push_gap(&mut out, &mut st, &mut sv, &mut jumps, prefix, cur, &mut next_idx, hit.sigma, hit.point, hv);
        let start = prefix + lambda * hit.sigma;
        let rerooted: Loop = match &hit.root_indices {
            Some(idx) if l.path().is_lattice() => l.reroot_index(idx[b.roots[h]]),
            _ => l.reroot(theta)?,
        };
        let tl = l.duration();
        let end = (prefix + tl) + lambda * hit.sigma;
        let rp = rerooted.path();
        for i in 1..rp.len() {
            let t = start + rp.times()[i];
            if rp.times()[i] >= tl || t >= end {
                break;
            }
            out.push(t, rp.points()[i], lattice_vertex(rp, i));
        }
        if tl > 0.0 {
            out.push(end, hit.point, hv);
            if *st.last().unwrap() < start {
                st.push(start);
                sv.push(hit.sigma);
            }
            st.push(end);
            sv.push(hit.sigma);
        }
        reach.push(ReachEntry { hit: h, loop_index: hit.loop_index, sigma: hit.sigma, theta, start, end });
        prefix += tl;
        cur = hit.sigma;
    }
    let total_time = prefix + lambda * t_gamma;
    push_gap(
        &mut out,
        &mut st,
        &mut sv,
        &mut jumps,
        prefix,
        cur,
        &mut next_idx,
        t_gamma,
        g.end(),
        lattice_vertex(g, gt.len() - 1),
    );
    if *st.last().unwrap() < total_time {
        st.push(total_time);
        sv.push(t_gamma);
    }
    let path = finish(cfg, lambda, out.samples, !jumps.is_empty())?;
    Ok(AttachmentResult { path, sigma: SigmaPath { times: st, values: sv }, reach, total_time, lambda, jumps })
}

/// Assemble the output path, as a lattice path whenever the loops and the
/// slowed-down path share one lattice and one time step.
fn finish(
    cfg: &Configuration,
    lambda: f64,
    samples: Vec<(f64, Point, Option<Vertex>)>,
    jumps: bool,
) -> Result<TimedPath> {
    if !jumps {
        if let Some(gd) = cfg.gamma().lattice_data() {
            let step = lambda * gd.time_step;
            let same = cfg.hits().iter().all(|h| {
                cfg.soup().loops[h.loop_index]
                    .path()
                    .lattice_data()
                    .is_some_and(|d| d.mesh == gd.mesh && (d.time_step - step).abs() <= 1e-12 * step)
            });
            if same && step > 0.0 && samples.iter().all(|s| s.2.is_some()) {
                let loop_step = cfg
                    .hits()
                    .first()
                    .map(|h| cfg.soup().loops[h.loop_index].path().lattice_data().unwrap().time_step)
                    .unwrap_or(step);
                let vertices: Vec<Vertex> = samples.iter().map(|s| s.2.unwrap()).collect();
                if let Ok(p) = TimedPath::lattice(vertices, gd.mesh, loop_step) {
                    return Ok(p);
                }
            }
        }
    }
    let s: Vec<(f64, Point)> = samples.into_iter().map(|(t, p, _)| (t, p)).collect();
    if jumps {
        TimedPath::with_jumps(s)
    } else {
        TimedPath::continuum(s)
    }
}

/// `omega^1_delta(X)`: largest gap in `{0, t_gamma} ∪ {sigma_l : t_l >= delta}`.
pub fn density_gap(cfg: &Configuration, delta: f64) -> f64 {
    let mut s: Vec<f64> =
        cfg.hits().iter().filter(|h| cfg.soup().loops[h.loop_index].duration() >= delta).map(|h| h.sigma).collect();
    s.push(0.0);
    s.push(cfg.gamma().duration());
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// `T_l` of the hit `h`, summed literally over the loops preceding it.
pub fn reach_time(cfg: &Configuration, lambda: f64, b: &TieBreak, h: usize) -> f64 {
    let pos = b.order.iter().position(|&x| x == h).expect("hit in order");
    b.order[..pos].iter().map(|&p| cfg.hit_loop(p).duration()).sum::<f64>() + lambda * cfg.hits()[h].sigma
}

/// `sigma_{X,lambda}(t)` evaluated directly from its definition.
pub fn sigma_of(cfg: &Configuration, lambda: f64, b: &TieBreak, t: f64) -> f64 {
    let hits = cfg.hits();
    let t_gamma = cfg.gamma().duration();
    let intervals: Vec<(f64, f64, f64)> = (0..hits.len())
        .map(|h| {
            let s = reach_time(cfg, lambda, b, h);
            (s, s + cfg.hit_loop(h).duration(), hits[h].sigma)
        })
        .collect();
    let t_x = intervals.iter().map(|i| i.1 - i.0).sum::<f64>() + lambda * t_gamma;
    for &(a, e, s) in &intervals {
        if a < t && t < e {
            return s;
        }
    }
    let t_minus = intervals.iter().filter(|i| i.1 <= t).map(|i| i.1).fold(0.0, f64::max);
    let t_plus = intervals.iter().filter(|i| i.0 >= t).map(|i| i.0).fold(t_x, f64::min);
    let s_minus = intervals.iter().filter(|i| i.1 <= t).map(|i| i.2).fold(0.0, f64::max);
    let s_plus = intervals.iter().filter(|i| i.0 >= t).map(|i| i.2).fold(t_gamma, f64::min);
    let mu = if t_plus > t_minus { (t - t_minus) / (t_plus - t_minus) } else { 0.0 };
    (1.0 - mu) * s_minus + mu * s_plus
}

/// The path `t -> gamma(sigma(t))` on the clock of `X`.
pub fn gamma_sigma_path(cfg: &Configuration, result: &AttachmentResult) -> Result<TimedPath> {
    let g = cfg.gamma();
    let gt = g.times();
    let (st, sv) = (&result.sigma.times, &result.sigma.values);
    let mut out: Vec<(f64, Point)> = alloc::vec![(0.0, g.eval_clamped(sv[0]))];
    let mut jumps = false;
    for i in 1..st.len() {
        let (t0, t1, s0, s1) = (st[i - 1], st[i], sv[i - 1], sv[i]);
        if t1 == t0 {
            jumps |= s1 != s0;
        } else if s1 > s0 {
            let lo = gt.partition_point(|&s| s <= s0);
            let hi = gt.partition_point(|&s| s < s1);
            for &s in &gt[lo..hi] {
                out.push((t0 + (t1 - t0) * (s - s0) / (s1 - s0), g.eval_clamped(s)));
            }
        }
        out.push((t1, g.eval_clamped(s1)));
    }
    out.dedup_by(|b, a| b.0 == a.0 && b.1 == a.1);
    let mut cleaned: Vec<(f64, Point)> = Vec::with_capacity(out.len());
    for s in out {
        if cleaned.last().is_some_and(|l: &(f64, Point)| s.0 < l.0) {
            continue;
        }
        cleaned.push(s);
    }
    if jumps || cleaned.windows(2).any(|w| w[0].0 == w[1].0) {
        TimedPath::with_jumps(cleaned)
    } else {
        TimedPath::continuum(cleaned)
    }
}
