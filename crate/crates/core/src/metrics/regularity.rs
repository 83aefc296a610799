//! Diagnostics of the regularity conditions a configuration should satisfy
//! before the attachment map is expected to behave continuously.

use alloc::vec::Vec;

use super::config_distance::{omega_grid, soup_modulus};
use crate::attach::density_gap;
use crate::soup::Configuration;

/// Side classification of a hit loop at its root on a lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BilateralFlag {
    Bilateral,
    OneSidedLeft,
    OneSidedRight,
    /// The loop only uses edges of the path at its root.
    OnPath,
    /// The root is the first or last vertex of the path.
    EndpointRoot,
    /// Continuum configurations are not classified.
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitSide {
    pub loop_index: usize,
    pub flag: BilateralFlag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub total_time: f64,
    pub total_time_finite: bool,
    /// `(delta, omega_delta(L))` on the grid.
    pub equicontinuity: Vec<(f64, f64)>,
    pub sigma_injective: bool,
    /// Pairs of loop indices sharing a first-hit time.
    pub sigma_collisions: Vec<(usize, usize)>,
    pub roots_unique: bool,
    pub multi_root_loops: Vec<usize>,
    /// `(delta, omega^1_delta(X))` on the grid.
    pub density_gap: Vec<(f64, f64)>,
    pub bilateral: Vec<HitSide>,
}

/// Classify the edges of a lattice loop at the path vertex `gamma[i]`.
///
/// With `out` the direction of the outgoing path edge and `back` the direction
/// of the incoming one reversed, the left side consists of the directions
/// strictly counter-clockwise from `out` to `back`, the right side of those
/// strictly counter-clockwise from `back` to `out`.
pub fn lattice_side(cfg: &Configuration, hit: usize) -> BilateralFlag {
    let (Some(gv), Some(i)) = (cfg.gamma().vertices(), cfg.hits()[hit].gamma_index) else {
        return BilateralFlag::NotEvaluated;
    };
    let Some(lv) = cfg.hit_loop(hit).path().vertices() else {
        return BilateralFlag::NotEvaluated;
    };
    if i == 0 || i + 1 == gv.len() {
        return BilateralFlag::EndpointRoot;
    }
    let x = gv[i];
    let (Some(out), Some(back)) = (x.direction_to(gv[i + 1]), x.direction_to(gv[i - 1])) else {
        return BilateralFlag::NotEvaluated;
    };
    let ccw = |from: usize, to: usize, d: usize| {
        let span = (to + 4 - from) % 4;
        let off = (d + 4 - from) % 4;
        off > 0 && off < span
    };
    let (mut left, mut right) = (false, false);
    for w in lv.windows(2) {
        let other = if w[0] == x {
            w[1]
        } else if w[1] == x {
            w[0]
        } else {
            continue;
        };
        if let Some(d) = x.direction_to(other) {
            left |= ccw(out, back, d);
            right |= ccw(back, out, d);
        }
    }
    match (left, right) {
        (true, true) => BilateralFlag::Bilateral,
        (true, false) => BilateralFlag::OneSidedLeft,
        (false, true) => BilateralFlag::OneSidedRight,
        (false, false) => BilateralFlag::OnPath,
    }
}

pub fn regularity_check(cfg: &Configuration) -> RegularityReport {
    let grid = omega_grid();
    let loops = &cfg.soup().loops;
    let total_time = cfg.total_time();
    let mut sigma_collisions = Vec::new();
    for class in cfg.sigma_classes() {
        for (k, &a) in class.iter().enumerate() {
            for &b in &class[k + 1..] {
                sigma_collisions.push((cfg.hits()[a].loop_index, cfg.hits()[b].loop_index));
            }
        }
    }
    let multi_root_loops: Vec<usize> =
        cfg.hits().iter().filter(|h| h.roots.len() > 1 || h.ambiguous).map(|h| h.loop_index).collect();
    let bilateral = (0..cfg.hits().len())
        .map(|h| HitSide {
            loop_index: cfg.hits()[h].loop_index,
            flag: if cfg.is_lattice() { lattice_side(cfg, h) } else { BilateralFlag::NotEvaluated },
        })
        .collect();
    RegularityReport {
        total_time,
        total_time_finite: total_time.is_finite(),
        equicontinuity: grid.iter().map(|&d| (d, soup_modulus(loops, d))).collect(),
        sigma_injective: sigma_collisions.is_empty(),
        sigma_collisions,
        roots_unique: multi_root_loops.is_empty(),
        multi_root_loops,
        density_gap: grid.iter().map(|&d| (d, density_gap(cfg, d))).collect(),
        bilateral,
    }
}
