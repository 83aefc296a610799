//! Exact sampling of random walk loop soups on a finite lattice domain.
//!
//! For every root `x` and even length `k <= K`, the number of rooted loops
//! `N_k(x)` (closed nearest-neighbour walks in the domain) is computed
//! exactly with big integers. The soup contains `Poisson(N_k(x) 4^{-k} / k)`
//! loops of each kind, each uniform among the `N_k(x)` candidates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{LoopSoup, SoupMeta, SoupSource};
use crate::error::{precondition, Result};
use crate::lattice::{LatticeDomain, Vertex};
use crate::path::Loop;

/// Largest number of big-integer table entries the exact sampler will build.
pub const MAX_TABLE_ENTRIES: usize = 20_000_000;

/// Walk counts `W_r[k][v]`: walks of length `k` from root `r` to `v` inside
/// the domain, for every root.
#[derive(Debug, Clone)]
pub struct WalkCounts {
    max_len: usize,
    n: usize,
    /// `table[r][k * n + v]`
    table: Vec<Vec<BigUint>>,
    neighbours: Vec<Vec<usize>>,
}

impl WalkCounts {
    pub fn new(domain: &LatticeDomain, max_len: usize) -> Result<Self> {
        let n = domain.len();
        if n.saturating_mul(n).saturating_mul(max_len + 1) > MAX_TABLE_ENTRIES {
            return Err(precondition(format!(
                "exact loop counting on {n} vertices up to length {max_len} is too large; use the thinning sampler"
            )));
        }
        let neighbours: Vec<Vec<usize>> = (0..n).map(|i| domain.neighbours(i).collect()).collect();
        let mut table = Vec::with_capacity(n);
        for r in 0..n {
            let mut t = vec![BigUint::zero(); (max_len + 1) * n];
            t[r] = BigUint::from(1u32);
            for k in 1..=max_len {
                let (prev, cur) = t.split_at_mut(k * n);
                let prev = &prev[(k - 1) * n..];
                for v in 0..n {
                    let mut s = BigUint::zero();
                    for &w in &neighbours[v] {
                        s += &prev[w];
                    }
                    cur[v] = s;
                }
            }
            table.push(t);
        }
        Ok(WalkCounts { max_len, n, table, neighbours })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Walks of length `k` from the root with index `r` to vertex index `v`.
    pub fn walks(&self, r: usize, k: usize, v: usize) -> &BigUint {
        &self.table[r][k * self.n + v]
    }

    /// Rooted closed walks `N_k(x)` at vertex index `x`.
    pub fn closed(&self, x: usize, k: usize) -> &BigUint {
        self.walks(x, k, x)
    }

    /// `tr(P^k)` for the walk restricted to the domain.
    pub fn trace(&self, k: usize) -> f64 {
        (0..self.n).map(|x| ratio_pow4(self.closed(x, k), k)).sum()
    }

    /// Decode the `index`-th closed walk of length `k` at root `r` (in the
    /// order given by the neighbour lists) as a list of vertex indices.
    pub fn decode(&self, r: usize, k: usize, mut index: BigUint) -> Vec<usize> {
        let mut out = Vec::with_capacity(k + 1);
        let mut v = r;
        out.push(v);
        for step in 0..k {
            let remaining = k - step - 1;
            let mut chosen = None;
            for &w in &self.neighbours[v] {
                let c = self.walks(r, remaining, w);
                if index < *c {
                    chosen = Some(w);
                    break;
                }
                index -= c;
            }
            v = chosen.expect("index below the closed-walk count");
            out.push(v);
        }
        out
    }
}

/// `count / 4^k` as a float, exact up to rounding even when `count` is huge.
pub(crate) fn ratio_pow4(count: &BigUint, k: usize) -> f64 {
    let bits = count.bits() as i64;
    if bits <= 900 {
        libm::ldexp(count.to_f64().unwrap_or(0.0), -(2 * k as i32))
    } else {
        let shift = (bits - 64) as usize;
        let top = (count >> shift).to_f64().unwrap_or(0.0);
        libm::ldexp(top, shift as i32 - 2 * k as i32)
    }
}

/// Uniform big integer in `[0, bound)`.
pub(crate) fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let mask = if top_bits == 32 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        if let Some(last) = digits.last_mut() {
            *last &= mask;
        }
        let x = BigUint::new(digits);
        if x < *bound {
            return x;
        }
    }
}

/// Exact random walk loop soup sampler for a fixed domain and length cut-off.
#[derive(Debug, Clone)]
pub struct ExactLoopSampler {
    domain: LatticeDomain,
    counts: WalkCounts,
    /// `(root, length, mean, law)` for every class with positive mean.
    classes: Vec<(usize, usize, f64, Poisson<f64>)>,
    truncated_mass: f64,
    truncated_mass_is_bound: bool,
}

impl ExactLoopSampler {
    pub fn new(domain: &LatticeDomain, max_len: usize) -> Result<Self> {
        let counts = WalkCounts::new(domain, max_len)?;
        let mut classes = Vec::new();
        for x in 0..domain.len() {
            for k in (2..=max_len).step_by(2) {
                let mean = ratio_pow4(counts.closed(x, k), k) / k as f64;
                if mean > 0.0 {
                    classes.push((x, k, mean, Poisson::new(mean).expect("positive mean")));
                }
            }
        }
        let (truncated_mass, truncated_mass_is_bound) = match domain.rectangle() {
            Some((w, h)) => (super::rectangle_tail_mass(w, h, max_len), false),
            None => super::tail_mass_from_traces(domain, &counts),
        };
        Ok(ExactLoopSampler { domain: domain.clone(), counts, classes, truncated_mass, truncated_mass_is_bound })
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn counts(&self) -> &WalkCounts {
        &self.counts
    }

    /// Expected number of rooted loops of length `k` at vertex index `x`.
    pub fn intensity(&self, x: usize, k: usize) -> f64 {
        ratio_pow4(self.counts.closed(x, k), k) / k as f64
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn meta(&self) -> SoupMeta {
        SoupMeta {
            source: SoupSource::LatticeExact,
            domain_mesh: Some(self.domain.mesh()),
            max_len: Some(self.counts.max_len),
            tmin: None,
            bridge_step: None,
            mass: None,
            truncated_mass: Some(self.truncated_mass),
            truncated_mass_is_bound: self.truncated_mass_is_bound,
        }
    }

    /// Raw vertex lists of one soup draw, in class order.
    pub fn sample_vertices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<Vertex>> {
        let vs = self.domain.vertices();
        let mut out = Vec::new();
        for (x, k, _, law) in &self.classes {
            let count = law.sample(rng) as u64;
            for _ in 0..count {
                let idx = uniform_below(self.counts.closed(*x, *k), rng);
                out.push(self.counts.decode(*x, *k, idx).into_iter().map(|i| vs[i]).collect());
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
