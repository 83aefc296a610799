//! Random walk loop soups, Brownian loop soups and the hit structure of a
//! path together with a soup.

mod brownian;
mod config;
mod counts;
mod massive;
mod tail;
mod thinning;

pub use brownian::{point_in_polygon, sample_brownian_soup, BrownianSoupSampler};
pub use config::{build_configuration, small_loop_time, Configuration, HitRecord, ROOT_TOL};
pub use counts::{ExactLoopSampler, WalkCounts, MAX_TABLE_ENTRIES};
pub use massive::{lattice_retention, thin_massive, MassiveThinning};
pub use tail::{closed_walk_traces, rectangle_tail_mass, tail_mass_from_traces, thinning_tail_bound, ThinningWeights};
pub use thinning::{sample_plane_bridge, ThinningLoopSampler};

use alloc::vec::Vec;

use crate::path::Loop;

/// How a soup was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoupSource {
    /// Exact per-root counting sampler on a lattice domain.
    LatticeExact,
    /// Lattice loops drawn on `Z^2` and thinned to the domain.
    LatticeThinning,
    /// Discretised Brownian loops restricted to a planar domain.
    Brownian,
    /// Loops supplied by the caller.
    Given,
}

/// Description of a sampled soup.
#[derive(Debug, Clone, PartialEq)]
pub struct SoupMeta {
    pub source: SoupSource,
    /// Mesh of the lattice domain the soup lives on.
    pub domain_mesh: Option<f64>,
    /// Largest loop length sampled (lattice soups).
    pub max_len: Option<usize>,
    /// Smallest loop duration sampled (Brownian soups).
    pub tmin: Option<f64>,
    pub bridge_step: Option<f64>,
    /// Mass parameter of a thinned massive soup.
    pub mass: Option<f64>,
    /// Expected number of loops not sampled because of the length cut-off;
    /// `None` when the omitted measure is infinite.
    pub truncated_mass: Option<f64>,
    /// True when `truncated_mass` is an upper bound rather than exact.
    pub truncated_mass_is_bound: bool,
}

impl SoupMeta {
    pub fn given() -> Self {
        SoupMeta {
            source: SoupSource::Given,
            domain_mesh: None,
            max_len: None,
            tmin: None,
            bridge_step: None,
            mass: None,
            truncated_mass: None,
            truncated_mass_is_bound: false,
        }
    }
}

/// A finite collection of loops.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSoup {
    pub loops: Vec<Loop>,
    pub meta: SoupMeta,
}

impl LoopSoup {
    pub fn new(loops: Vec<Loop>) -> Self {
        LoopSoup { loops, meta: SoupMeta::given() }
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Sum of the loop durations.
    pub fn total_duration(&self) -> f64 {
        self.loops.iter().map(Loop::duration).sum()
    }

    /// Apply the same space and time scaling to every loop.
    pub fn scaled(&self, space: f64, time: f64) -> crate::Result<Self> {
        let loops =
            self.loops.iter().map(|l| l.scale_space(space)?.scale_time(time)).collect::<crate::Result<Vec<_>>>()?;
        Ok(LoopSoup { loops, meta: self.meta.clone() })
    }
}
