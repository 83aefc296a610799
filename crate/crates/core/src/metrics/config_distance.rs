//! The distance `d_R0` between configurations and its weak variant.

use alloc::vec::Vec;

use super::iso::{soup_distance, IsoMatching};
use crate::path::Loop;
use crate::rho::rho;
use crate::soup::Configuration;

/// Exponents `j` of the grid `delta = 2^-j` used for the modulus term.
pub const OMEGA_GRID_LEVELS: u32 = 20;

/// The grid `{2^-j : j = 0..=OMEGA_GRID_LEVELS}`.
pub fn omega_grid() -> Vec<f64> {
    (0..=OMEGA_GRID_LEVELS).map(|j| libm::ldexp(1.0, -(j as i32))).collect()
}

/// `omega_delta(L) = sup over loops of omega_delta(l)`, zero for an empty soup.
pub fn soup_modulus(loops: &[Loop], delta: f64) -> f64 {
    loops.iter().map(|l| l.path().modulus(delta)).fold(0.0, f64::max)
}

/// Terms of `d_R0(X, X') = rho + d + |t_X - t_X'| + ||omega(L) - omega(L')||`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDistance {
    /// Certified upper bound on `rho(gamma, gamma')`.
    pub rho: f64,
    pub rho_error_bound: f64,
    pub d: f64,
    pub dt: f64,
    pub domega: f64,
    pub d_r0: f64,
    /// `rho + d`.
    pub d_r0_weak: f64,
    pub witness: IsoMatching,
}

pub fn config_distance(a: &Configuration, b: &Configuration, rho_grid: usize) -> ConfigDistance {
    let r = rho(a.gamma(), b.gamma(), rho_grid);
    let sd = soup_distance(&a.soup().loops, &b.soup().loops);
    let dt = (a.total_time() - b.total_time()).abs();
    let domega = omega_grid()
        .into_iter()
        .map(|delta| (soup_modulus(&a.soup().loops, delta) - soup_modulus(&b.soup().loops, delta)).abs())
        .fold(0.0, f64::max);
    ConfigDistance {
        rho: r.value,
        rho_error_bound: r.error_bound,
        d: sd.distance,
        dt,
        domega,
        d_r0: r.value + sd.distance + dt + domega,
        d_r0_weak: r.value + sd.distance,
        witness: sd.witness,
    }
}
