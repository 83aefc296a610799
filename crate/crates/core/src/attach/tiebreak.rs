//! Tie-breaks: a total order on hit loops compatible with their first-hit
//! times, together with a choice of root for every hit loop.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::soup::Configuration;

/// A tie-break `B` for a configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TieBreak {
    /// Hit indices in attachment order; `sigma` is non-decreasing along it.
    pub order: Vec<usize>,
    /// For every hit index, the position of the chosen root in its root list.
    pub roots: Vec<usize>,
}

impl TieBreak {
    /// Order by first-hit time, then loop index; every loop uses its first root.
    pub fn default_for(cfg: &Configuration) -> Self {
        let order = cfg.sigma_classes().into_iter().flatten().collect();
        TieBreak { order, roots: alloc::vec![0; cfg.hits().len()] }
    }

    /// Check that this is a tie-break for `cfg`.
    pub fn validate(&self, cfg: &Configuration) -> Result<()> {
        let hits = cfg.hits();
        let n = hits.len();
        if self.order.len() != n || self.roots.len() != n {
            return Err(Error::TieBreak(format!(
                "expected {n} hits, got order {} roots {}",
                self.order.len(),
                self.roots.len()
            )));
        }
        let mut seen = alloc::vec![false; n];
        for &h in &self.order {
            if h >= n || seen[h] {
                return Err(Error::TieBreak("order is not a permutation of the hits".into()));
            }
            seen[h] = true;
        }
        let classes = cfg.sigma_classes();
        let mut class_of = alloc::vec![0usize; n];
        for (c, members) in classes.iter().enumerate() {
            for &h in members {
                class_of[h] = c;
            }
        }
        if self.order.windows(2).any(|w| class_of[w[0]] > class_of[w[1]]) {
            return Err(Error::TieBreak("order is not compatible with first-hit times".into()));
        }
        for (h, &r) in self.roots.iter().enumerate() {
            if r >= hits[h].roots.len() {
                return Err(Error::TieBreak(format!("hit {h} has no root number {r}")));
            }
        }
        Ok(())
    }
}

/// All tie-breaks of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TieBreakSet {
    classes: Vec<Vec<usize>>,
    root_counts: Vec<usize>,
}

/// Enumerate the tie-breaks `B_X` of a configuration: orders of every
/// first-hit class times root choices of every hit loop.
pub fn enumerate_tie_breaks(cfg: &Configuration) -> TieBreakSet {
    TieBreakSet { classes: cfg.sigma_classes(), root_counts: cfg.hits().iter().map(|h| h.roots.len()).collect() }
}

impl TieBreakSet {
    /// `prod |class|! * prod |Theta_l|`.
    pub fn count(&self) -> BigUint {
        let mut c = BigUint::from(1u32);
        for class in &self.classes {
            for k in 2..=class.len() {
                c *= BigUint::from(k);
            }
        }
        for &r in &self.root_counts {
            c *= BigUint::from(r);
        }
        c
    }

    /// True when the tie-break is forced.
    pub fn is_trivial(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1) && self.root_counts.iter().all(|&r| r == 1)
    }

    /// A uniformly random tie-break.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> TieBreak {
        let mut order = Vec::with_capacity(self.root_counts.len());
        for class in &self.classes {
            let mut c = class.clone();
            if c.len() > 1 {
                c.shuffle(rng);
            }
            order.extend(c);
        }
        let roots = self.root_counts.iter().map(|&r| if r > 1 { rng.random_range(0..r) } else { 0 }).collect();
        TieBreak { order, roots }
    }

    /// Iterate over every tie-break exactly once.
    pub fn iter(&self) -> TieBreakIter<'_> {
        TieBreakIter {
            set: self,
            perms: self.classes.clone(),
            roots: alloc::vec![0; self.root_counts.len()],
            done: false,
        }
    }
}

/// Iterator returned by [`TieBreakSet::iter`].
pub struct TieBreakIter<'a> {
    set: &'a TieBreakSet,
    perms: Vec<Vec<usize>>,
    roots: Vec<usize>,
    done: bool,
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Iterator for TieBreakIter<'_> {
    type Item = TieBreak;

    fn next(&mut self) -> Option<TieBreak> {
        if self.done {
            return None;
        }
        let item = TieBreak { order: self.perms.iter().flatten().copied().collect(), roots: self.roots.clone() };
        // odometer: roots first, then class permutations
        let mut advanced = false;
        for (r, &n) in self.roots.iter_mut().zip(&self.set.root_counts) {
            if *r + 1 < n {
                *r += 1;
                advanced = true;
                break;
            }
            *r = 0;
        }
        if !advanced {
            for p in self.perms.iter_mut() {
                if next_permutation(p) {
                    advanced = true;
                    break;
                }
            }
        }
        self.done = !advanced;
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_in_lexicographic_order() {
        let mut v = alloc::vec![0, 1, 2];
        let mut all = alloc::vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(v, alloc::vec![0, 1, 2]);
    }
}
