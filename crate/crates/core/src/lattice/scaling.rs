//! Brownian scaling of lattice walks and loop-erased walks.

use alloc::vec::Vec;

use super::Vertex;
use crate::error::Result;
use crate::path::TimedPath;

/// Default time-scaling constant for loop-erased walks.
pub const DEFAULT_C_STAR: f64 = 1.0;

/// Random-walk scaling: space by `1/n`, one step per `1/(2 n^2)` time.
pub fn scale_walk(vertices: Vec<Vertex>, n: f64) -> Result<TimedPath> {
    TimedPath::lattice(vertices, n, 1.0 / (2.0 * n * n))
}

/// Loop-erased scaling: space by `1/n`, one step per `1/(c* n^{5/4})` time.
pub fn scale_lerw(vertices: Vec<Vertex>, n: f64, c_star: f64) -> Result<TimedPath> {
    TimedPath::lattice(vertices, n, 1.0 / (c_star * libm::pow(n, 1.25)))
}

/// Attachment speed `(c*/2) n^{-3/4}` under which scaled loops and the scaled
/// loop-erased path share one time step.
pub fn lambda_n(n: f64, c_star: f64) -> f64 {
    0.5 * c_star * libm::pow(n, -0.75)
}
