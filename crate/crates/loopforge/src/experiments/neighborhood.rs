//! Expected number of domain vertices within distance `k` of a loop-erased
//! walk.

use loopforge_core::lattice::{sample_lerw, Vertex};
use loopforge_core::rng::{derive_seed, stream};
use serde::{Deserialize, Serialize};

use super::{require, square_domain};
use crate::error::CliResult;
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::{linear_fit, Moments};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeighborhoodParams {
    pub mesh: usize,
    pub k: Vec<usize>,
    pub replicates: u64,
    /// Constant `C'` of the lower bound `k >= C' log n`.
    pub c_prime: f64,
    pub max_slope: f64,
}

impl Default for NeighborhoodParams {
    fn default() -> Self {
        NeighborhoodParams { mesh: 64, k: vec![4, 8, 16], replicates: 200, c_prime: 1.0, max_slope: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodRow {
    pub k: usize,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodStatistics {
    pub domain_vertices: usize,
    pub rows: Vec<NeighborhoodRow>,
    pub fitted_exponent: Option<f64>,
}

/// Number of vertices of the `(2n - 1)`-box within Euclidean distance `k` of
/// some vertex of `path`.
pub fn neighbourhood_size(n: usize, path: &[Vertex], k: usize) -> usize {
    let h = n as i32 - 1;
    let side = (2 * h + 1) as usize;
    let mut mark = vec![false; side * side];
    let r = k as i32;
    let r2 = (k * k) as i64;
    for v in path {
        for dy in -r..=r {
            let y = v.y + dy;
            if y.abs() > h {
                continue;
            }
            for dx in -r..=r {
                let x = v.x + dx;
                if x.abs() <= h && (dx as i64 * dx as i64 + dy as i64 * dy as i64) <= r2 {
                    mark[(y + h) as usize * side + (x + h) as usize] = true;
                }
            }
        }
    }
    mark.iter().filter(|&&m| m).count()
}

pub fn run(params: &NeighborhoodParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    let n = params.mesh;
    require(n >= 2, || "mesh must be at least 2".into())?;
    require(!params.k.is_empty() && params.k.iter().all(|&k| k >= 1), || "k values must be positive".into())?;
    require(params.replicates >= 2, || "at least two replicates are needed".into())?;
    let dom = square_domain(n)?;
    let mut ks = params.k.clone();
    ks.sort_unstable();
    ks.dedup();
    let kk = ks.clone();
    let sizes = runner.try_map(params.replicates, |i| {
        let mut rng = stream(derive_seed(seed, 0), i);
        let g = sample_lerw(&dom, &mut rng)?;
        Ok(kk.iter().map(|&k| neighbourhood_size(n, &g, k) as f64).collect::<Vec<f64>>())
    })?;
    let rows: Vec<NeighborhoodRow> = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let m = Moments::from_slice(&sizes.iter().map(|s| s[j]).collect::<Vec<_>>());
            NeighborhoodRow { k, mean: m.mean(), se: m.se() }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (r.k as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    let fit = linear_fit(&xs, &ys).map(|f| f.1);

    let mut report = ExperimentReport::new("neighborhood", params, seed);
    report.replicates = params.replicates;
    report.threshold("max_slope", params.max_slope);
    let lower = params.c_prime * (n as f64).ln();
    for &k in &ks {
        if (k as f64) < lower {
            report.flag(format!("k = {k} is below C' log n = {lower:.3}"));
        }
        if 2 * k > n {
            report.flag(format!("k = {k} exceeds n / 2"));
        }
    }
    report.check("monotone", rows.windows(2).all(|w| w[1].mean >= w[0].mean), "cardinality is non-decreasing in k");
    match fit {
        Some(b) => report.check("exponent", b <= params.max_slope, format!("fitted log-log slope {b:.4}")),
        None => report.check("exponent", false, "the fit needs at least two k values"),
    }
    report.set_statistics(&NeighborhoodStatistics { domain_vertices: dom.len(), rows, fitted_exponent: fit });
    Ok(report)
}
