//! Deterministic parallel execution of independent replicates.

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// A worker pool. Results are collected in replicate order, so every
/// reduction over them is independent of the number of workers.
pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `jobs = None` uses one worker per available core.
    pub fn new(jobs: Option<usize>) -> CliResult<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            if j == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        let pool = b.build().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Runner { pool })
    }

    pub fn single_threaded() -> Self {
        Runner::new(Some(1)).expect("a one-thread pool")
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `[f(0), f(1), ..., f(n - 1)]`.
    pub fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(&f).collect())
    }

    /// As [`Runner::map`], stopping at the first error in replicate order.
    pub fn try_map<T, F>(&self, n: u64, f: F) -> CliResult<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> CliResult<T> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_does_not_depend_on_jobs() {
        let f = |i: u64| loopforge_core::rng::derive_seed(5, i);
        let a = Runner::new(Some(1)).unwrap().map(1000, f);
        let b = Runner::new(Some(4)).unwrap().map(1000, f);
        assert_eq!(a, b);
        assert!(Runner::new(Some(0)).is_err());
    }
}
