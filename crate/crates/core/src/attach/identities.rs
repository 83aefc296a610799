//! Scaling identities of the attachment map, checked numerically.
//!
//! Each check rebuilds the transformed configuration from scratch (hits are
//! recomputed, not copied), transfers the tie-break by loop index and reports
//! the uniform distance `d_inf` between the two sides.

use alloc::vec::Vec;

use super::tiebreak::TieBreak;
use super::xi::{attach, AttachOptions};
use crate::error::{Error, Result};
use crate::lattice::{lambda_n, scale_lerw, scale_walk};
use crate::path::{d_inf, Loop, SimplePath, TimedPath};
use crate::soup::{build_configuration, Configuration, LoopSoup};

/// Discrepancy between the two sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub discrepancy: f64,
    pub lhs_duration: f64,
    pub rhs_duration: f64,
}

fn check(lhs: &TimedPath, rhs: &TimedPath) -> IdentityCheck {
    IdentityCheck { discrepancy: d_inf(lhs, rhs), lhs_duration: lhs.duration(), rhs_duration: rhs.duration() }
}

/// Move a tie-break between two configurations built from the same loops.
pub fn transfer_tie_break(from: &Configuration, to: &Configuration, b: &TieBreak) -> Result<TieBreak> {
    if from.hits().len() != to.hits().len() {
        return Err(Error::Mismatch("the configurations have different hit sets".into()));
    }
    let map: Vec<usize> = from
        .hits()
        .iter()
        .map(|h| to.hit_of_loop(h.loop_index).ok_or_else(|| Error::Mismatch("hit sets differ".into())))
        .collect::<Result<_>>()?;
    let order = b.order.iter().map(|&h| map[h]).collect();
    let mut roots = alloc::vec![0; b.roots.len()];
    for (h, &r) in b.roots.iter().enumerate() {
        roots[map[h]] = r;
    }
    Ok(TieBreak { order, roots })
}

fn rebuild(gamma: TimedPath, loops: Vec<Loop>, meta_from: &LoopSoup) -> Result<Configuration> {
    let soup = LoopSoup { loops, meta: meta_from.meta.clone() };
    build_configuration(&SimplePath::new(gamma)?, &soup)
}

/// `Xi(a gamma, a L, lambda, B) = a Xi(gamma, L, lambda, B)`.
pub fn check_space_scaling(cfg: &Configuration, lambda: f64, b: &TieBreak, a: f64) -> Result<IdentityCheck> {
    let x = attach(cfg, lambda, b, AttachOptions::default())?;
    let loops = cfg.soup().loops.iter().map(|l| l.scale_space(a)).collect::<Result<Vec<_>>>()?;
    let scaled = rebuild(cfg.gamma().scale_space(a)?, loops, cfg.soup())?;
    let b2 = transfer_tie_break(cfg, &scaled, b)?;
    let y = attach(&scaled, lambda, &b2, AttachOptions::default())?;
    Ok(check(&y.path, &x.path.scale_space(a)?))
}

/// With `S_c f = f(c .)`: `Xi(S_c gamma, S_c L, lambda, B) = S_c Xi(gamma, L, lambda, B)`.
pub fn check_time_scaling(cfg: &Configuration, lambda: f64, b: &TieBreak, c: f64) -> Result<IdentityCheck> {
    let x = attach(cfg, lambda, b, AttachOptions::default())?;
    let loops = cfg.soup().loops.iter().map(|l| l.scale_time(c)).collect::<Result<Vec<_>>>()?;
    let scaled = rebuild(cfg.gamma().scale_time(c)?, loops, cfg.soup())?;
    let b2 = transfer_tie_break(cfg, &scaled, b)?;
    let y = attach(&scaled, lambda, &b2, AttachOptions::default())?;
    Ok(check(&y.path, &x.path.scale_time(c)?))
}

/// `Xi(S_c gamma, L, lambda, B) = Xi(gamma, L, lambda / c, B)`.
pub fn check_speed_scaling(cfg: &Configuration, lambda: f64, b: &TieBreak, c: f64) -> Result<IdentityCheck> {
    let x = attach(cfg, lambda / c, b, AttachOptions::default())?;
    let scaled = rebuild(cfg.gamma().scale_time(c)?, cfg.soup().loops.clone(), cfg.soup())?;
    let b2 = transfer_tie_break(cfg, &scaled, b)?;
    let y = attach(&scaled, lambda, &b2, AttachOptions::default())?;
    Ok(check(&y.path, &x.path))
}

/// For a unit-time lattice configuration on `Z^2`:
/// `phi_n(Xi(gamma, L, 1, B)) = Xi(phi*_n gamma, phi_n L, lambda_n, B)`.
pub fn check_lattice_scaling(cfg: &Configuration, b: &TieBreak, n: f64, c_star: f64) -> Result<IdentityCheck> {
    let gv = cfg
        .gamma()
        .lattice_data()
        .filter(|d| d.mesh == 1.0 && d.time_step == 1.0)
        .ok_or_else(|| Error::Mismatch("lattice scaling needs a unit lattice path".into()))?;
    let x = attach(cfg, 1.0, b, AttachOptions::default())?;
    let xv = x.path.vertices().ok_or_else(|| Error::Mismatch("unit attachment is not a lattice path".into()))?;
    let lhs = scale_walk(xv.to_vec(), n)?;
    let loops = cfg
        .soup()
        .loops
        .iter()
        .map(|l| {
            let v = l.path().vertices().ok_or_else(|| Error::Mismatch("continuum loop".into()))?;
            Loop::new(scale_walk(v.to_vec(), n)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let scaled = rebuild(scale_lerw(gv.vertices.clone(), n, c_star)?, loops, cfg.soup())?;
    let b2 = transfer_tie_break(cfg, &scaled, b)?;
    let y = attach(&scaled, lambda_n(n, c_star), &b2, AttachOptions::default())?;
    Ok(check(&lhs, &y.path))
}
