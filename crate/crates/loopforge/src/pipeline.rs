//! The sampling pipeline shared by the experiments and the CLI:
//! loop-erased walk, loop soup, uniform tie-break, attachment.

use loopforge_core::attach::{attach, enumerate_tie_breaks, AttachOptions, AttachmentResult, TieBreak};
use loopforge_core::lattice::{sample_lerw, LatticeDomain, Vertex};
use loopforge_core::soup::{
    build_configuration, rectangle_tail_mass, thinning_tail_bound, Configuration, ExactLoopSampler, LoopSoup,
    ThinningLoopSampler,
};
use loopforge_core::{SimplePath, TimedPath};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Which random walk loop soup sampler to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Exact per-root counting.
    #[default]
    Exact,
    /// Plane bridges thinned to the domain.
    Thinning,
}

pub enum SoupSampler {
    Exact(Box<ExactLoopSampler>),
    Thinning(ThinningLoopSampler),
}

impl SoupSampler {
    pub fn new(kind: SamplerKind, dom: &LatticeDomain, max_len: usize) -> CliResult<Self> {
        Ok(match kind {
            SamplerKind::Exact => SoupSampler::Exact(Box::new(ExactLoopSampler::new(dom, max_len)?)),
            SamplerKind::Thinning => SoupSampler::Thinning(ThinningLoopSampler::new(dom, max_len)),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LoopSoup {
        match self {
            SoupSampler::Exact(s) => s.sample(rng),
            SoupSampler::Thinning(s) => s.sample(rng),
        }
    }

    pub fn truncated_mass(&self) -> f64 {
        match self {
            SoupSampler::Exact(s) => s.truncated_mass(),
            SoupSampler::Thinning(s) => s.truncated_mass(),
        }
    }
}

/// Expected number of loops of length above `max_len` in the domain: exact
/// on rectangles, an upper bound otherwise.
pub fn tail_mass(dom: &LatticeDomain, max_len: usize) -> f64 {
    match dom.rectangle() {
        Some((w, h)) => rectangle_tail_mass(w, h, max_len),
        None => thinning_tail_bound(dom.len(), max_len),
    }
}

/// Largest loop length the rule below will search up to.
pub const MAX_LEN_CAP: usize = 1 << 20;

/// Smallest even `K` with `tail_mass(K) * replicates < budget`.
pub fn choose_max_len(dom: &LatticeDomain, replicates: u64, budget: f64) -> CliResult<usize> {
    let ok = |k: usize| tail_mass(dom, k) * (replicates as f64) < budget;
    let mut hi = 2;
    while !ok(hi) {
        hi *= 2;
        if hi > MAX_LEN_CAP {
            return Err(CliError::Invalid(format!(
                "no loop length cut-off up to {MAX_LEN_CAP} keeps the expected number of omitted loops below {budget}"
            )));
        }
    }
    if hi == 2 {
        return Ok(2);
    }
    let mut lo = hi / 2;
    while hi - lo > 2 {
        let mid = (lo + hi) / 4 * 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A unit-lattice simple path from vertices.
pub fn lattice_gamma(vs: Vec<Vertex>) -> CliResult<SimplePath> {
    Ok(SimplePath::new(TimedPath::lattice(vs, 1.0, 1.0)?)?)
}

pub struct Attached {
    pub config: Configuration,
    pub tie_break: TieBreak,
    pub result: AttachmentResult,
}

impl Attached {
    pub fn gamma_vertices(&self) -> &[Vertex] {
        self.config.gamma().vertices().expect("lattice path")
    }

    /// `LE(X) = gamma`.
    pub fn loop_erasure_recovers_gamma(&self) -> bool {
        match self.result.path.loop_erase() {
            Ok(le) => le == self.gamma_vertices(),
            Err(_) => false,
        }
    }

    /// Relative discrepancy of `t_X = sum of hit loop durations + lambda t_gamma`.
    pub fn duration_discrepancy(&self) -> f64 {
        duration_discrepancy(&self.config, &self.result)
    }
}

pub fn duration_discrepancy(cfg: &Configuration, x: &AttachmentResult) -> f64 {
    let loops: f64 = cfg.hits().iter().map(|h| cfg.soup().loops[h.loop_index].duration()).sum();
    let expected = loops + x.lambda * cfg.gamma().duration();
    let got = x.path.duration();
    let scale = expected.abs().max(1.0);
    ((got - expected).abs() / scale).max((x.total_time - expected).abs() / scale)
}

/// Attach a soup to a path with a uniformly drawn tie-break.
pub fn attach_uniform<R: Rng + ?Sized>(
    gamma: &SimplePath,
    soup: &LoopSoup,
    lambda: f64,
    rng: &mut R,
) -> CliResult<Attached> {
    let config = build_configuration(gamma, soup)?;
    let tie_break = enumerate_tie_breaks(&config).sample_uniform(rng);
    let result = attach(&config, lambda, &tie_break, AttachOptions::default())?;
    Ok(Attached { config, tie_break, result })
}

/// A loop-erased walk from the origin, an independent soup and their
/// attachment on the unit lattice.
pub fn lerw_attach<R: Rng + ?Sized>(
    dom: &LatticeDomain,
    sampler: &SoupSampler,
    lambda: f64,
    rng: &mut R,
) -> CliResult<Attached> {
    let gamma = lattice_gamma(sample_lerw(dom, rng)?)?;
    let soup = sampler.sample(rng);
    attach_uniform(&gamma, &soup, lambda, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use loopforge_core::rng::stream;

    #[test]
    fn cut_off_is_the_smallest_even_admissible_length() {
        let dom = LatticeDomain::from_box(3, 3).unwrap();
        let k = choose_max_len(&dom, 200_000, 1e-2).unwrap();
        assert_eq!(k % 2, 0);
        assert!(tail_mass(&dom, k) * 2e5 < 1e-2);
        assert!(tail_mass(&dom, k - 2) * 2e5 >= 1e-2);
        let single = LatticeDomain::from_box(1, 1).unwrap();
        assert_eq!(choose_max_len(&single, 1_000_000, 1e-2).unwrap(), 2);
    }

    #[test]
    fn pipeline_replicate_satisfies_the_identities() {
        let dom = LatticeDomain::from_box(5, 5).unwrap();
        let s = SoupSampler::new(SamplerKind::Exact, &dom, 12).unwrap();
        for i in 0..50 {
            let a = lerw_attach(&dom, &s, 1.0, &mut stream(3, i)).unwrap();
            assert!(a.loop_erasure_recovers_gamma());
            assert!(a.duration_discrepancy() <= 1e-12);
        }
    }
}
