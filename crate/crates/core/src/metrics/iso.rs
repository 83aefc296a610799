//! The soup distance `d(L, L') = inf { delta > 0 : a delta-isomorphism exists }`.
//!
//! A delta-isomorphism is a bijection `phi : L_0 -> L'_0` between sub-soups
//! with `L_{>=delta} ⊆ L_0`, `L'_{>=delta} ⊆ L'_0`, every pair at uniform distance
//! at most `delta / 2`, and no pair made only of loops shorter than `delta`.

use alloc::vec::Vec;

use super::flow::BoundedFlow;
use crate::path::{d_inf, Loop};
use crate::soup::Configuration;

/// A witness isomorphism between two soups.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoMatching {
    /// The isomorphism is a `delta`-isomorphism.
    pub delta: f64,
    /// Matched pairs `(index in L, index in L')`.
    pub pairs: Vec<(usize, usize)>,
}

impl IsoMatching {
    pub fn image(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == i).map(|p| p.1)
    }

    pub fn preimage(&self, j: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == j).map(|p| p.0)
    }

    /// Check the defining conditions against the loops.
    pub fn is_valid_for(&self, a: &[Loop], b: &[Loop]) -> bool {
        let d = self.delta;
        let mut used_a = alloc::vec![false; a.len()];
        let mut used_b = alloc::vec![false; b.len()];
        for &(i, j) in &self.pairs {
            if i >= a.len() || j >= b.len() || used_a[i] || used_b[j] {
                return false;
            }
            used_a[i] = true;
            used_b[j] = true;
            if d_inf(a[i].path(), b[j].path()) > d / 2.0 {
                return false;
            }
            if a[i].duration() < d && b[j].duration() < d {
                return false;
            }
        }
        a.iter().zip(&used_a).all(|(l, u)| *u || l.duration() < d)
            && b.iter().zip(&used_b).all(|(l, u)| *u || l.duration() < d)
    }
}

/// Result of [`soup_distance`].
#[derive(Debug, Clone, PartialEq)]
pub struct SoupDistance {
    pub distance: f64,
    /// A valid isomorphism at `witness.delta`; the witness delta equals the
    /// distance when the infimum is attained and lies just above it otherwise.
    pub witness: IsoMatching,
}

/// Pairwise uniform distances `d_inf(l_i, l'_j)`.
pub fn distance_matrix(a: &[Loop], b: &[Loop]) -> Vec<Vec<f64>> {
    a.iter().map(|l| b.iter().map(|m| d_inf(l.path(), m.path())).collect()).collect()
}

/// A `delta`-isomorphism, if one exists, from the pairwise distances and
/// the loop durations.
pub fn isomorphism_at(ta: &[f64], tb: &[f64], dist: &[Vec<f64>], delta: f64) -> Option<Vec<(usize, usize)>> {
    let (n, m) = (ta.len(), tb.len());
    let s = n + m;
    let t = s + 1;
    let mut f = BoundedFlow::new(n + m + 2);
    let mut pair_edges = Vec::new();
    for (i, &ti) in ta.iter().enumerate() {
        if ti >= delta / 2.0 {
            f.add_edge(s, i, (ti >= delta) as i64, 1);
        } else if ti >= delta {
            return None;
        }
    }
    for (j, &tj) in tb.iter().enumerate() {
        if tj >= delta / 2.0 {
            f.add_edge(n + j, t, (tj >= delta) as i64, 1);
        }
    }
    for i in 0..n {
        if ta[i] < delta / 2.0 {
            continue;
        }
        for j in 0..m {
            if tb[j] >= delta / 2.0 && dist[i][j] <= delta / 2.0 {
                pair_edges.push((f.add_edge(i, n + j, 0, 1), i, j));
            }
        }
    }
    f.add_edge(t, s, 0, (n + m) as i64);
    if !f.feasible_circulation() {
        return None;
    }
    Some(
        pair_edges
            .into_iter()
            .filter(|&(e, i, j)| f.flow(e) > 0 && (ta[i] >= delta || tb[j] >= delta))
            .map(|(_, i, j)| (i, j))
            .collect(),
    )
}

/// `d(L, L')` with a witness isomorphism.
///
/// Feasibility is monotone in `delta` and changes only at the breakpoints
/// `{2 d_inf(l, l')} ∪ {t_l} ∪ {t_l'}`, so it suffices to test one point in each
/// interval between consecutive breakpoints.
pub fn soup_distance(a: &[Loop], b: &[Loop]) -> SoupDistance {
    let dist = distance_matrix(a, b);
    soup_distance_with(a, b, &dist)
}

pub fn soup_distance_with(a: &[Loop], b: &[Loop], dist: &[Vec<f64>]) -> SoupDistance {
    let ta: Vec<f64> = a.iter().map(Loop::duration).collect();
    let tb: Vec<f64> = b.iter().map(Loop::duration).collect();
    let mut cands: Vec<f64> = alloc::vec![0.0];
    cands.extend(ta.iter().copied());
    cands.extend(tb.iter().copied());
    cands.extend(dist.iter().flatten().map(|d| 2.0 * d));
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let probe = |k: usize| -> f64 {
        if k + 1 < cands.len() {
            0.5 * (cands[k] + cands[k + 1])
        } else {
            cands[k] + 1.0
        }
    };
    // smallest k whose interval (c_k, c_{k+1}) is feasible
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if isomorphism_at(&ta, &tb, dist, probe(mid)).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let distance = cands[lo];
    let witness = match (distance > 0.0).then(|| isomorphism_at(&ta, &tb, dist, distance)).flatten() {
        Some(pairs) => IsoMatching { delta: distance, pairs },
        None => {
            let d = probe(lo);
            IsoMatching { delta: d, pairs: isomorphism_at(&ta, &tb, dist, d).expect("feasible probe") }
        }
    };
    SoupDistance { distance, witness }
}

/// Outcome of [`is_suited`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Suitedness {
    pub suited: bool,
    pub strongly_suited: bool,
}

/// Whether a witness between the soups of two configurations respects the
/// loops hitting the paths at scale `eps`, and whether it also preserves the
/// order of their first-hit times.
pub fn is_suited(witness: &IsoMatching, a: &Configuration, b: &Configuration, eps: f64) -> Suitedness {
    let la = &a.soup().loops;
    let lb = &b.soup().loops;
    let mut set: Vec<(usize, usize)> = Vec::new();
    let mut suited = true;
    for h in a.hits() {
        if la[h.loop_index].duration() >= eps {
            match witness.image(h.loop_index) {
                Some(j) if b.hit_of_loop(j).is_some() => set.push((h.loop_index, j)),
                _ => suited = false,
            }
        }
    }
    for h in b.hits() {
        if lb[h.loop_index].duration() >= eps {
            match witness.preimage(h.loop_index) {
                Some(i) if a.hit_of_loop(i).is_some() => {
                    if !set.contains(&(i, h.loop_index)) {
                        set.push((i, h.loop_index));
                    }
                }
                _ => suited = false,
            }
        }
    }
    if !suited {
        return Suitedness { suited, strongly_suited: false };
    }
    let sa = |i: usize| a.hits()[a.hit_of_loop(i).unwrap()].sigma;
    let sb = |j: usize| b.hits()[b.hit_of_loop(j).unwrap()].sigma;
    let mut strong = true;
    'outer: for (x, &(i1, j1)) in set.iter().enumerate() {
        for &(i2, j2) in &set[x + 1..] {
            if (sa(i1) < sa(i2)) != (sb(j1) < sb(j2)) || (sa(i2) < sa(i1)) != (sb(j2) < sb(j1)) {
                strong = false;
                break 'outer;
            }
        }
    }
    Suitedness { suited, strongly_suited: strong }
}
