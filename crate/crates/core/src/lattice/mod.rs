//! Square-lattice vertices, discrete domains and walk samplers.

mod domain;
mod scaling;
mod walk;

pub use domain::LatticeDomain;
pub use scaling::{lambda_n, scale_lerw, scale_walk, DEFAULT_C_STAR};
pub use walk::{
    sample_killed_conditioned, sample_killed_lerw, sample_lerw, sample_srw, KilledSample, DEFAULT_REJECTION_BUDGET,
    SRW_STEP_CAP,
};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::geom::Point;

/// A vertex of `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

/// Unit steps in counter-clockwise order: east, north, west, south.
pub const STEPS: [Vertex; 4] = [Vertex::new(1, 0), Vertex::new(0, 1), Vertex::new(-1, 0), Vertex::new(0, -1)];

impl Vertex {
    pub const ORIGIN: Vertex = Vertex::new(0, 0);

    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    pub fn step(self, dir: usize) -> Vertex {
        let d = STEPS[dir & 3];
        Vertex::new(self.x + d.x, self.y + d.y)
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    /// Index into [`STEPS`] of the unit step from `self` to `other`.
    pub fn direction_to(self, other: Vertex) -> Option<usize> {
        let d = Vertex::new(other.x - self.x, other.y - self.y);
        STEPS.iter().position(|s| *s == d)
    }

    /// The point `vertex / mesh`.
    pub fn to_point(self, mesh: f64) -> Point {
        if mesh == 1.0 {
            Point::new(self.x as f64, self.y as f64)
        } else {
            Point::new(self.x as f64 / mesh, self.y as f64 / mesh)
        }
    }

    pub fn dist_sq(self, other: Vertex) -> i64 {
        let dx = (self.x - other.x) as i64;
        let dy = (self.y - other.y) as i64;
        dx * dx + dy * dy
    }
}

/// Chronological loop erasure: whenever the walk revisits a vertex, the
/// loop made since its previous visit is removed.
pub fn loop_erase(path: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(path.len());
    let mut pos: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &v in path {
        if let Some(&p) = pos.get(&v) {
            for w in out.drain(p + 1..) {
                pos.remove(&w);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    out
}
