//! Mass of the loops longer than the sampling cut-off.
//!
//! The total mass of rooted loops of length `k` in a domain is
//! `tr(P^k) / k`, where `P` is the walk transition kernel killed on leaving
//! the domain; summed over all `k` it equals `-log det(I - P)`.

use alloc::vec;
use alloc::vec::Vec;

use super::counts::WalkCounts;
use crate::lattice::LatticeDomain;

/// `tr(P^k)` for `k = 0..=max_len`, by propagating point masses.
pub fn closed_walk_traces(domain: &LatticeDomain, max_len: usize) -> Vec<f64> {
    let n = domain.len();
    let nb: Vec<Vec<usize>> = (0..n).map(|i| domain.neighbours(i).collect()).collect();
    let mut tr = vec![0.0; max_len + 1];
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    for r in 0..n {
        cur.iter_mut().for_each(|x| *x = 0.0);
        cur[r] = 1.0;
        tr[0] += 1.0;
        for t in tr.iter_mut().skip(1) {
            for v in 0..n {
                next[v] = 0.25 * nb[v].iter().map(|&w| cur[w]).sum::<f64>();
            }
            core::mem::swap(&mut cur, &mut next);
            *t += cur[r];
        }
    }
    tr
}

/// `log det(I - P)` by a banded Cholesky factorisation in domain order.
pub fn log_det_i_minus_p(domain: &LatticeDomain) -> f64 {
    let n = domain.len();
    let nb: Vec<Vec<usize>> = (0..n).map(|i| domain.neighbours(i).collect()).collect();
    let band = nb.iter().enumerate().flat_map(|(i, l)| l.iter().map(move |&j| i.abs_diff(j))).max().unwrap_or(0);
    // a[i][d] holds entry (i, i - d) for d in 0..=band
    let mut a = vec![vec![0.0f64; band + 1]; n];
    for i in 0..n {
        a[i][0] = 1.0;
        for &j in &nb[i] {
            if j < i {
                a[i][i - j] = -0.25;
            }
        }
    }
    let mut log_det = 0.0;
    for i in 0..n {
        for d in (0..=band.min(i)).rev() {
            let j = i - d;
            // entry (i, j) minus sum over k < j of L(i,k) L(j,k)
            let mut s = a[i][d];
            let lo = i.saturating_sub(band).max(j.saturating_sub(band));
            for k in lo..j {
                s -= a[i][i - k] * a[j][j - k];
            }
            if d == 0 {
                let l = libm::sqrt(s);
                a[i][0] = l;
                log_det += 2.0 * libm::log(l);
            } else {
                a[i][d] = s / a[j][0];
            }
        }
    }
    log_det
}

/// `-log det(I - P) - sum_{k <= K} tr(P^k) / k`, clamped to be non-negative.
pub fn tail_mass_from_traces(domain: &LatticeDomain, counts: &WalkCounts) -> (f64, bool) {
    let head: f64 = (2..=counts.max_len()).step_by(2).map(|k| counts.trace(k) / k as f64).sum();
    ((-log_det_i_minus_p(domain) - head).max(0.0), false)
}

/// Tail mass `sum_{k > K} tr(P^k) / k` on a full `w x h` rectangle, using the
/// eigenvalues `(cos(a pi/(w+1)) + cos(b pi/(h+1))) / 2` of `P`.
pub fn rectangle_tail_mass(w: usize, h: usize, max_len: usize) -> f64 {
    let ca: Vec<f64> = (1..=w).map(|a| libm::cos(core::f64::consts::PI * a as f64 / (w + 1) as f64)).collect();
    let cb: Vec<f64> = (1..=h).map(|b| libm::cos(core::f64::consts::PI * b as f64 / (h + 1) as f64)).collect();
    let mut total = 0.0;
    for (a, &x) in ca.iter().enumerate() {
        for (b, &y) in cb.iter().enumerate() {
            // the eigenvalue vanishes exactly when a/(w+1) + b/(h+1) = 1
            if (a + 1) * (h + 1) + (b + 1) * (w + 1) == (w + 1) * (h + 1) {
                continue;
            }
            let mu = 0.5 * (x + y);
            let m2 = mu * mu;
            // sum over even k = 2j > K of mu^k / k
            let mut j = max_len / 2 + 1;
            let mut pw = libm::pow(m2, j as f64);
            let mut s = 0.0;
            loop {
                let term = pw / (2 * j) as f64;
                s += term;
                if term <= 1e-18 * s / (1.0 - m2).max(1e-300) || pw < 1e-300 {
                    break;
                }
                pw *= m2;
                j += 1;
            }
            total += s;
        }
    }
    total
}

/// Plane intensities `c_k = C(k, k/2)^2 4^{-k} / k` of rooted `Z^2` loops.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinningWeights {
    /// `c[k]` for `k = 0..=K` (zero for odd `k` and `k = 0`).
    pub c: Vec<f64>,
}

impl ThinningWeights {
    pub fn new(max_len: usize) -> Self {
        let mut c = vec![0.0; max_len + 1];
        // q_k = C(k, k/2) / 2^k
        let mut q = 1.0f64;
        let mut k = 0;
        while k + 2 <= max_len {
            q *= (k + 1) as f64 / (k + 2) as f64;
            k += 2;
            c[k] = q * q / k as f64;
        }
        ThinningWeights { c }
    }
}

/// Upper bound `|V| sum_{k > K} c_k` on the loops a thinning sampler with
/// cut-off `K` omits.
pub fn thinning_tail_bound(vertices: usize, max_len: usize) -> f64 {
    // sum the exact c_k up to a far cut-off, then use c_k <= 2 / (pi k^2)
    let far = (max_len.max(2) * 64).max(100_000);
    let mut q = 1.0f64;
    let mut k = 0usize;
    let mut s = 0.0;
    while k + 2 <= far {
        q *= (k + 1) as f64 / (k + 2) as f64;
        k += 2;
        if k > max_len {
            s += q * q / k as f64;
        }
    }
    let j = (far / 2) as f64;
    vertices as f64 * (s + 1.0 / (2.0 * core::f64::consts::PI * j))
}
