//! Command-line tools, file formats and Monte Carlo verification for
//! chronological loop-soup attachment, built on `loopforge-core`.
//!
//! * [`format`]: JSON forms of paths, soups, configurations and results.
//! * [`pipeline`]: loop-erased walk, soup, tie-break and attachment in one call.
//! * [`experiments`]: the statistical experiments and their reports.
//! * [`suites`]: deterministic check suites over random instances.
//! * [`plot`]: CSV tables and SVG charts of reports.
//! * [`cli`]: the `loopforge` executable.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod format;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod runner;
pub mod stats;
pub mod suites;

pub use error::{CliError, CliResult};
pub use report::ExperimentReport;
pub use runner::Runner;
