//! Mean number of soup loops of length `k` rooted at the origin against the
//! whole-plane intensity `4^{-k} C(k, k/2)^2 / k`.

use loopforge_core::lattice::{LatticeDomain, Vertex};
use loopforge_core::rng::{derive_seed, stream};
use loopforge_core::soup::ExactLoopSampler;
use serde::{Deserialize, Serialize};

use super::require;
use crate::error::CliResult;
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::Moments;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntensityParams {
    pub k: Vec<usize>,
    pub replicates: u64,
    pub se_factor: f64,
}

impl Default for IntensityParams {
    fn default() -> Self {
        IntensityParams { k: vec![2, 4, 6], replicates: 100_000, se_factor: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityRow {
    pub k: usize,
    pub target: f64,
    /// Intensity of the class in the sampler's counting tables.
    pub table: f64,
    pub mean: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityStatistics {
    pub box_side: usize,
    pub rows: Vec<IntensityRow>,
}

/// `4^{-k} C(k, k/2)^2 / k`.
pub fn plane_intensity(k: usize) -> f64 {
    let mut q = 1.0f64;
    for i in 0..k / 2 {
        q *= (k - i) as f64 / ((k / 2 - i) as f64 * 4.0);
    }
    q * q / k as f64
}

pub fn run(params: &IntensityParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    require(!params.k.is_empty(), || "at least one loop length is needed".into())?;
    for &k in &params.k {
        require(k >= 2 && k % 2 == 0 && k <= 8, || format!("loop length {k} must be even and lie in 2..=8"))?;
    }
    require(params.replicates >= 2, || "at least two replicates are needed".into())?;
    let kmax = *params.k.iter().max().unwrap();
    // a length-k loop from the origin stays within distance k/2
    let side = kmax + 1;
    let dom = LatticeDomain::from_box(side, side)?;
    let sampler = ExactLoopSampler::new(&dom, kmax)?;
    let origin = dom.index_of(Vertex::ORIGIN).expect("centred box");
    let ks = params.k.clone();
    let counts = runner.map(params.replicates, |i| {
        let mut rng = stream(derive_seed(seed, 0), i);
        let loops = sampler.sample_vertices(&mut rng);
        ks.iter()
            .map(|&k| loops.iter().filter(|l| l.len() == k + 1 && l[0] == Vertex::ORIGIN).count() as f64)
            .collect::<Vec<f64>>()
    });
    let mut report = ExperimentReport::new("intensity", params, seed);
    report.replicates = params.replicates;
    report.threshold("se_factor", params.se_factor);
    let mut rows = Vec::new();
    for (j, &k) in params.k.iter().enumerate() {
        let m = Moments::from_slice(&counts.iter().map(|c| c[j]).collect::<Vec<_>>());
        let target = plane_intensity(k);
        let table = sampler.intensity(origin, k);
        let z = if m.se() > 0.0 { (m.mean() - target) / m.se() } else { f64::INFINITY };
        report.check(
            &format!("k={k}"),
            z.abs() <= params.se_factor,
            format!("mean {:.6} vs {target:.6}, se {:.2e}, z = {z:.3}", m.mean(), m.se()),
        );
        report.check(
            &format!("table k={k}"),
            (table - target).abs() <= 1e-12 * target,
            format!("counting tables give {table:.12}"),
        );
        rows.push(IntensityRow { k, target, table, mean: m.mean(), se: m.se(), z });
    }
    report.set_statistics(&IntensityStatistics { box_side: side, rows });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(plane_intensity(2), 0.125);
        assert!((plane_intensity(4) - 36.0 / 1024.0).abs() < 1e-15);
        assert!((plane_intensity(6) - 400.0 / 24576.0).abs() < 1e-15);
    }

    #[test]
    fn small_run_reports_the_targets() {
        let p = IntensityParams { k: vec![2], replicates: 2000, ..Default::default() };
        let r = run(&p, 4, &Runner::new(Some(2)).unwrap()).unwrap();
        let st: IntensityStatistics = serde_json::from_value(r.statistics).unwrap();
        assert_eq!(st.rows[0].target, 0.125);
        assert_eq!(st.box_side, 3);
        assert!(run(&IntensityParams { k: vec![3], ..p }, 4, &Runner::single_threaded()).is_err());
    }
}
