//! Loop soups by thinning the `Z^2` soup.
//!
//! Rooted `Z^2` loops of length `k` at a fixed root have total intensity
//! `c_k`. Candidates are drawn with uniform roots in the domain and uniform
//! bridge shapes, and kept when the whole loop lies in the domain; the kept
//! loops form the domain soup exactly, at a cost linear in the loop lengths.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::tail::{rectangle_tail_mass, thinning_tail_bound, ThinningWeights};
use super::{LoopSoup, SoupMeta, SoupSource};
use crate::lattice::{LatticeDomain, Vertex};
use crate::path::Loop;

/// Uniform closed walk of length `k` (even) on `Z^2` from `root`.
///
/// In the rotated coordinates `u = x + y`, `v = x - y` a uniform step is a pair
/// of independent signs, so a uniform bridge is a pair of independent uniform
/// balanced sign sequences.
pub fn sample_plane_bridge<R: Rng + ?Sized>(root: Vertex, k: usize, rng: &mut R) -> Vec<Vertex> {
    let mut a: Vec<bool> = (0..k).map(|i| i < k / 2).collect();
    let mut b = a.clone();
    a.shuffle(rng);
    b.shuffle(rng);
    let mut out = Vec::with_capacity(k + 1);
    let mut v = root;
    out.push(v);
    for i in 0..k {
        v = v.step(rotated_step(a[i], b[i]));
        out.push(v);
    }
    out
}

#[inline]
fn rotated_step(a: bool, b: bool) -> usize {
    match (a, b) {
        (true, true) => 0,   // (1, 0)
        (true, false) => 1,  // (0, 1)
        (false, false) => 2, // (-1, 0)
        (false, true) => 3,  // (0, -1)
    }
}

/// Thinning sampler for a fixed domain and length cut-off.
#[derive(Debug, Clone)]
pub struct ThinningLoopSampler {
    domain: LatticeDomain,
    max_len: usize,
    laws: Vec<(usize, Poisson<f64>)>,
    truncated_mass: f64,
    truncated_mass_is_bound: bool,
}

impl ThinningLoopSampler {
    pub fn new(domain: &LatticeDomain, max_len: usize) -> Self {
        let w = ThinningWeights::new(max_len);
        let n = domain.len() as f64;
        let laws = (2..=max_len)
            .step_by(2)
            .filter(|&k| w.c[k] * n > 0.0)
            .map(|k| (k, Poisson::new(w.c[k] * n).expect("positive mean")))
            .collect();
        let (truncated_mass, truncated_mass_is_bound) = match domain.rectangle() {
            Some((a, b)) => (rectangle_tail_mass(a, b, max_len), false),
            None => (thinning_tail_bound(domain.len(), max_len), true),
        };
        ThinningLoopSampler { domain: domain.clone(), max_len, laws, truncated_mass, truncated_mass_is_bound }
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn meta(&self) -> SoupMeta {
        SoupMeta {
            source: SoupSource::LatticeThinning,
            domain_mesh: Some(self.domain.mesh()),
            max_len: Some(self.max_len),
            tmin: None,
            bridge_step: None,
            mass: None,
            truncated_mass: Some(self.truncated_mass),
            truncated_mass_is_bound: self.truncated_mass_is_bound,
        }
    }

    /// Raw vertex lists of one soup draw, ordered by length then candidate.
    pub fn sample_vertices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<Vertex>> {
        let vs = self.domain.vertices();
        let mut out = Vec::new();
        let mut a: Vec<bool> = Vec::new();
        let mut b: Vec<bool> = Vec::new();
        for (k, law) in &self.laws {
            let candidates = law.sample(rng) as u64;
            for _ in 0..candidates {
                let root = vs[rng.random_range(0..vs.len())];
                a.clear();
                a.extend((0..*k).map(|i| i < k / 2));
                b.clear();
                b.extend_from_slice(&a);
                a.shuffle(rng);
                b.shuffle(rng);
                let mut v = root;
                let mut walk = Vec::with_capacity(k + 1);
                walk.push(v);
                let mut inside = true;
                for i in 0..*k {
                    v = v.step(rotated_step(a[i], b[i]));
                    if !self.domain.contains(v) {
                        inside = false;
                        break;
                    }
                    walk.push(v);
                }
                if inside {
                    out.push(walk);
                }
            }
        }
        out
    }

    /// One soup draw as unit-time lattice loops on `Z^2`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LoopSoup {
        let loops = self
            .sample_vertices(rng)
            .into_iter()
            .map(|v| Loop::lattice(v, 1.0, 1.0).expect("closed lattice walk"))
            .collect();
        LoopSoup { loops, meta: self.meta() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn bridges_close_and_step_to_neighbours() {
        let mut rng = rng_from_seed(11);
        for k in [2usize, 4, 10, 30] {
            for _ in 0..100 {
                let w = sample_plane_bridge(Vertex::new(3, -2), k, &mut rng);
                assert_eq!(w.len(), k + 1);
                assert_eq!(w[0], w[k]);
                assert!(w.windows(2).all(|p| p[0].is_adjacent(p[1])));
            }
        }
    }

    #[test]
    fn four_step_bridge_shapes_are_uniform() {
        // 36 rooted closed 4-step walks; each shape should get ~1/36
        let mut rng = rng_from_seed(4);
        let mut counts = alloc::collections::BTreeMap::new();
        let n = 72_000;
        for _ in 0..n {
            *counts.entry(sample_plane_bridge(Vertex::ORIGIN, 4, &mut rng)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 36);
        let e = n as f64 / 36.0;
        for c in counts.values() {
            assert!((*c as f64 - e).abs() < 5.0 * e.sqrt(), "{c} vs {e}");
        }
    }
}
