//! Distances between soups and configurations, and regularity diagnostics.

mod config_distance;
mod flow;
mod iso;
mod regularity;

pub use crate::attach::density_gap as density_modulus;
pub use config_distance::{config_distance, omega_grid, soup_modulus, ConfigDistance, OMEGA_GRID_LEVELS};
pub use flow::{BoundedFlow, FlowNetwork};
pub use iso::{
    distance_matrix, is_suited, isomorphism_at, soup_distance, soup_distance_with, IsoMatching, SoupDistance,
    Suitedness,
};
pub use regularity::{lattice_side, regularity_check, BilateralFlag, HitSide, RegularityReport};

/// Exhaustive reference value of the soup distance: the minimum over all
/// partial injections of the largest of `2 d_inf` over pairs and `t` over
/// unmatched loops.
#[doc(hidden)]
pub fn brute_force_soup_distance(a: &[crate::Loop], b: &[crate::Loop]) -> f64 {
    use alloc::vec::Vec;
    fn go(i: usize, ta: &[f64], tb: &[f64], d: &[Vec<f64>], used: &mut Vec<bool>, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == ta.len() {
            let rest = tb.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(t, _)| *t).fold(cur, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, ta, tb, d, used, cur.max(ta[i]), best);
        for j in 0..tb.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, ta, tb, d, used, cur.max(2.0 * d[i][j]), best);
                used[j] = false;
            }
        }
    }
    let ta: Vec<f64> = a.iter().map(|l| l.duration()).collect();
    let tb: Vec<f64> = b.iter().map(|l| l.duration()).collect();
    let d = distance_matrix(a, b);
    let mut best = f64::INFINITY;
    go(0, &ta, &tb, &d, &mut alloc::vec![false; tb.len()], 0.0, &mut best);
    best
}
