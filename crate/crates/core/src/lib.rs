//! Chronological attachment of loop soups to simple paths.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! * timed planar paths with the uniform distance, the reparametrisation
//!   distance and moduli of continuity ([`path`], [`rho`]),
//! * lattice domains and exact samplers for simple random walks, loop-erased
//!   random walks and their killed variants ([`lattice`]),
//! * random walk and Brownian loop soups and the hit structure of a
//!   `(path, soup)` configuration ([`soup`]),
//! * the attachment map that grafts the hit loops onto the path in
//!   chronological order ([`attach`]),
//! * distances between soups and configurations and regularity diagnostics
//!   ([`metrics`]).
#![no_std]

extern crate alloc;

pub mod attach;
pub mod error;
pub mod geom;
pub mod lattice;
pub mod metrics;
pub mod path;
pub mod rho;
pub mod rng;
pub mod soup;

pub use error::{Error, Result};
pub use geom::Point;
pub use path::{Loop, PathKind, SimplePath, TimedPath};
