use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{LatticeDomain, Vertex};
use crate::error::{Error, Result};

/// Simple random walks longer than this are reported as errors.
pub const SRW_STEP_CAP: u64 = 1_000_000_000;

/// Attempts allowed to the conditioned killed-walk sampler by default.
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

#[inline]
fn uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> usize {
    (rng.next_u32() >> 30) as usize
}

/// Simple random walk from the origin, stopped at its first step out of the
/// domain. The returned vertices include that exterior exit vertex.
pub fn sample_srw<R: Rng + ?Sized>(domain: &LatticeDomain, rng: &mut R) -> Result<Vec<Vertex>> {
    let mut v = Vertex::ORIGIN;
    let mut out = vec![v];
    let mut steps: u64 = 0;
    while domain.contains(v) {
        if steps == SRW_STEP_CAP {
            return Err(Error::StepCapExceeded(SRW_STEP_CAP));
        }
        v = v.step(uniform_direction(rng));
        out.push(v);
        steps += 1;
    }
    Ok(out)
}

/// Loop-erased random walk from the origin to the exterior boundary.
///
/// The walk is erased on the fly with a position table indexed by the domain.
pub fn sample_lerw<R: Rng + ?Sized>(domain: &LatticeDomain, rng: &mut R) -> Result<Vec<Vertex>> {
    let mut pos = vec![u32::MAX; domain.len()];
    let mut out = vec![Vertex::ORIGIN];
    pos[domain.index_of(Vertex::ORIGIN).expect("origin in domain")] = 0;
    let mut v = Vertex::ORIGIN;
    let mut steps: u64 = 0;
    loop {
        if steps == SRW_STEP_CAP {
            return Err(Error::StepCapExceeded(SRW_STEP_CAP));
        }
        v = v.step(uniform_direction(rng));
        steps += 1;
        match domain.index_of(v) {
            None => {
                out.push(v);
                return Ok(out);
            }
            Some(i) => {
                let p = pos[i];
                if p == u32::MAX {
                    pos[i] = out.len() as u32;
                    out.push(v);
                } else {
                    for w in out.drain(p as usize + 1..) {
                        pos[domain.index_of(w).unwrap()] = u32::MAX;
                    }
                }
            }
        }
    }
}

/// A conditioned killed walk together with its rejection statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct KilledSample {
    pub vertices: Vec<Vertex>,
    pub attempts: u64,
}

/// Random walk killed with probability `m^2 / (2 n^2)` before each step,
/// conditioned to leave the domain before it is killed (`n` is the mesh).
///
/// Sampling is by rejection; after `budget` killed attempts an error carrying
/// the observed acceptance count is returned.
pub fn sample_killed_conditioned<R: Rng + ?Sized>(
    domain: &LatticeDomain,
    mass: f64,
    budget: u64,
    rng: &mut R,
) -> Result<KilledSample> {
    let n = domain.mesh();
    let q = mass * mass / (2.0 * n * n);
    if !(0.0..1.0).contains(&q) {
        return Err(crate::error::precondition("kill probability must lie in [0, 1)"));
    }
    for attempt in 1..=budget {
        let mut v = Vertex::ORIGIN;
        let mut out = vec![v];
        let mut alive = true;
        while domain.contains(v) {
            if q > 0.0 && rng.random::<f64>() < q {
                alive = false;
                break;
            }
            v = v.step(uniform_direction(rng));
            out.push(v);
            if out.len() as u64 > SRW_STEP_CAP {
                return Err(Error::StepCapExceeded(SRW_STEP_CAP));
            }
        }
        if alive {
            return Ok(KilledSample { vertices: out, attempts: attempt });
        }
    }
    Err(Error::RejectionBudget { attempts: budget, accepted: 0 })
}

/// Loop erasure of [`sample_killed_conditioned`].
pub fn sample_killed_lerw<R: Rng + ?Sized>(
    domain: &LatticeDomain,
    mass: f64,
    budget: u64,
    rng: &mut R,
) -> Result<KilledSample> {
    let s = sample_killed_conditioned(domain, mass, budget, rng)?;
    Ok(KilledSample { vertices: super::loop_erase(&s.vertices), attempts: s.attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn srw_ends_on_first_exit() {
        let d = LatticeDomain::from_box(5, 5).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..200 {
            let w = sample_srw(&d, &mut rng).unwrap();
            assert_eq!(w[0], Vertex::ORIGIN);
            let (last, body) = w.split_last().unwrap();
            assert!(!d.contains(*last));
            assert!(body.iter().all(|v| d.contains(*v)));
            assert!(w.windows(2).all(|p| p[0].is_adjacent(p[1])));
        }
    }

    #[test]
    fn on_the_fly_erasure_matches_erasure_of_the_walk() {
        let d = LatticeDomain::from_box(7, 5).unwrap();
        for seed in 0..300 {
            let a = sample_lerw(&d, &mut rng_from_seed(seed)).unwrap();
            let b = crate::lattice::loop_erase(&sample_srw(&d, &mut rng_from_seed(seed)).unwrap());
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn zero_mass_walk_is_the_srw() {
        let d = LatticeDomain::from_box(5, 5).unwrap();
        let a = sample_killed_conditioned(&d, 0.0, 10, &mut rng_from_seed(9)).unwrap();
        assert_eq!(a.attempts, 1);
        assert_eq!(a.vertices, sample_srw(&d, &mut rng_from_seed(9)).unwrap());
    }

    #[test]
    fn heavy_killing_exhausts_the_budget() {
        let d = LatticeDomain::from_box_mesh(41, 41, 1.0).unwrap();
        // q = 0.4 per step and at least 20 steps are needed
        let err = sample_killed_conditioned(&d, 0.4f64.sqrt() * 2f64.sqrt(), 50, &mut rng_from_seed(1)).unwrap_err();
        assert_eq!(err, Error::RejectionBudget { attempts: 50, accepted: 0 });
    }
}
