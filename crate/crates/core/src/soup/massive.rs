//! Massive loop soups by independent thinning.

use alloc::vec::Vec;

use rand::Rng;

use super::LoopSoup;
use crate::error::{precondition, Result};
use crate::path::Loop;

/// Survival probability of a lattice loop of `steps` steps when each step
/// is killed with probability `m^2 / (2 n^2)`.
pub fn lattice_retention(steps: usize, mass: f64, mesh: f64) -> f64 {
    let q = mass * mass / (2.0 * mesh * mesh);
    libm::pow((1.0 - q).max(0.0), steps as f64)
}

/// A soup with one uniform mark per loop, so that thinning at several masses
/// uses the same randomness and is monotone in the mass.
#[derive(Debug, Clone)]
pub struct MassiveThinning {
    soup: LoopSoup,
    marks: Vec<f64>,
}

impl MassiveThinning {
    pub fn new<R: Rng + ?Sized>(soup: LoopSoup, rng: &mut R) -> Self {
        let marks = soup.loops.iter().map(|_| rng.random::<f64>()).collect();
        MassiveThinning { soup, marks }
    }

    fn retention(&self, l: &Loop, mass: f64) -> f64 {
        match (l.steps(), self.soup.meta.domain_mesh) {
            (Some(k), Some(n)) if l.path().lattice_data().is_some_and(|d| d.time_step == 1.0) => {
                lattice_retention(k, mass, n)
            }
            _ => libm::exp(-mass * mass * l.duration()),
        }
    }

    /// Loops kept at the given mass: lattice loops with their per-step
    /// survival probability, continuum loops with `exp(-m^2 t_l)`.
    pub fn at(&self, mass: f64) -> Result<LoopSoup> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(precondition("mass must be non-negative"));
        }
        let loops = self
            .soup
            .loops
            .iter()
            .zip(&self.marks)
            .filter(|(l, u)| **u < self.retention(l, mass))
            .map(|(l, _)| l.clone())
            .collect();
        let mut meta = self.soup.meta.clone();
        meta.mass = Some(mass);
        Ok(LoopSoup { loops, meta })
    }
}

/// Thin `soup` to mass `m`.
pub fn thin_massive<R: Rng + ?Sized>(soup: &LoopSoup, mass: f64, rng: &mut R) -> Result<LoopSoup> {
    MassiveThinning::new(soup.clone(), rng).at(mass)
}
