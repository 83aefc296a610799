//! Monte Carlo experiments. Each takes a parameter set and a master seed and
//! returns an [`ExperimentReport`](crate::report::ExperimentReport); the
//! report is a deterministic function of both.

pub mod intensity;
pub mod neighborhood;
pub mod scaling;
pub mod smallloop;
pub mod srw;
pub mod tail;

use loopforge_core::lattice::LatticeDomain;

use crate::error::{CliError, CliResult};

/// `nD ∩ Z^2` for `D = (-1, 1)^2`: the centred `(2n - 1) x (2n - 1)` box.
pub fn square_domain(n: usize) -> CliResult<LatticeDomain> {
    if n == 0 {
        return Err(CliError::Invalid("mesh must be at least 1".into()));
    }
    Ok(LatticeDomain::from_box(2 * n - 1, 2 * n - 1)?)
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Invalid(msg()))
    }
}

/// Letters of the four lattice directions.
pub const DIRECTIONS: [char; 4] = ['E', 'N', 'W', 'S'];
