//! The small-loop time `T_{<=delta}` of scaled loop-erased walk and soup
//! configurations, as a surface over meshes and scales.

use loopforge_core::lattice::sample_lerw;
use loopforge_core::rng::{derive_seed, stream};
use loopforge_core::soup::{build_configuration, small_loop_time, ThinningLoopSampler};
use serde::{Deserialize, Serialize};

use super::{require, square_domain};
use crate::error::CliResult;
use crate::pipeline::lattice_gamma;
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::Moments;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallLoopParams {
    pub meshes: Vec<usize>,
    pub deltas: Vec<f64>,
    pub replicates: u64,
    /// Loop length cut-off at mesh `n`, as a multiple of `n^2`.
    pub max_len_factor: f64,
    pub se_factor: f64,
}

impl Default for SmallLoopParams {
    fn default() -> Self {
        SmallLoopParams {
            meshes: vec![8, 16, 32],
            deltas: (1..=6).map(|j| 0.5f64.powi(j)).collect(),
            replicates: 1000,
            max_len_factor: 1.0,
            se_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub n: usize,
    pub delta: f64,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallLoopStatistics {
    pub max_len: Vec<usize>,
    pub surface: Vec<SurfaceCell>,
}

pub fn run(params: &SmallLoopParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    require(!params.meshes.is_empty() && params.meshes.iter().all(|&n| n >= 1), || "meshes must be positive".into())?;
    require(params.meshes.windows(2).all(|w| w[0] < w[1]), || "meshes must be strictly increasing".into())?;
    require(!params.deltas.is_empty() && params.deltas.iter().all(|&d| d > 0.0 && d.is_finite()), || {
        "scales must be positive".into()
    })?;
    require(params.replicates >= 2, || "at least two replicates are needed".into())?;
    let mut deltas = params.deltas.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));

    let mut report = ExperimentReport::new("smallloop", params, seed);
    report.replicates = params.replicates;
    report.threshold("se_factor", params.se_factor);
    let mut surface = Vec::new();
    let mut max_lens = Vec::new();
    for (a, &n) in params.meshes.iter().enumerate() {
        let dom = square_domain(n)?;
        let k = (((params.max_len_factor * (n * n) as f64) as usize) / 2 * 2).max(2);
        max_lens.push(k);
        let sampler = ThinningLoopSampler::new(&dom, k);
        let unit = 2.0 * (n * n) as f64;
        let ds = deltas.clone();
        let values = runner.try_map(params.replicates, |i| {
            let mut rng = stream(derive_seed(seed, a as u64), i);
            let gamma = lattice_gamma(sample_lerw(&dom, &mut rng)?)?;
            let cfg = build_configuration(&gamma, &sampler.sample(&mut rng))?;
            Ok(ds.iter().map(|d| small_loop_time(&cfg, d * unit) / unit).collect::<Vec<f64>>())
        })?;
        let cells: Vec<SurfaceCell> = deltas
            .iter()
            .enumerate()
            .map(|(j, &delta)| {
                let m = Moments::from_slice(&values.iter().map(|v| v[j]).collect::<Vec<_>>());
                SurfaceCell { n, delta, mean: m.mean(), se: m.se() }
            })
            .collect();
        let monotone = cells.windows(2).all(|w| w[1].mean <= w[0].mean);
        report.check(&format!("monotone n={n}"), monotone, "profile is non-increasing as delta shrinks");
        surface.extend(cells);
    }
    for w in params.meshes.windows(2) {
        for &delta in &deltas {
            let c = |n: usize| surface.iter().find(|c| c.n == n && c.delta == delta).expect("cell");
            let (lo, hi) = (c(w[0]), c(w[1]));
            let slack = params.se_factor * (lo.se * lo.se + hi.se * hi.se).sqrt();
            report.check(
                &format!("bounded delta={delta} n={}->{}", w[0], w[1]),
                hi.mean - lo.mean <= slack,
                format!("{:.5} -> {:.5}, allowed growth {slack:.5}", lo.mean, hi.mean),
            );
        }
    }
    report.set_statistics(&SmallLoopStatistics { max_len: max_lens, surface });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_surface_is_monotone() {
        let p = SmallLoopParams { meshes: vec![2, 4], replicates: 50, ..Default::default() };
        let r = run(&p, 3, &Runner::new(Some(2)).unwrap()).unwrap();
        let st: SmallLoopStatistics = serde_json::from_value(r.statistics.clone()).unwrap();
        assert_eq!(st.surface.len(), 12);
        assert_eq!(st.max_len, vec![4, 16]);
        assert!(r.checks.iter().filter(|c| c.name.starts_with("monotone")).all(|c| c.passed));
    }
}
