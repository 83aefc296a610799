//! Cross-mesh stability of the scaled attachment `phi_n(X)`.

use std::f64::consts::PI;

use loopforge_core::lattice::scale_walk;
use loopforge_core::rng::{derive_seed, stream};
use serde::{Deserialize, Serialize};

use super::{require, square_domain};
use crate::error::CliResult;
use crate::pipeline::{choose_max_len, lerw_attach, tail_mass, SamplerKind, SoupSampler};
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::{chi_square_two_sample, Moments};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingParams {
    pub meshes: [usize; 2],
    pub replicates: u64,
    /// Rescaled time at which the displacement is measured.
    pub time: f64,
    pub msd_tolerance: f64,
    pub angle_bins: usize,
    pub threshold_p: f64,
    pub se_factor: f64,
    pub tail_budget: f64,
    pub max_len: Option<usize>,
}

impl Default for ScalingParams {
    fn default() -> Self {
        ScalingParams {
            meshes: [16, 32],
            replicates: 10_000,
            time: 0.05,
            msd_tolerance: 0.05,
            angle_bins: 16,
            threshold_p: 1e-3,
            se_factor: 3.0,
            tail_budget: 1e-2,
            max_len: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub n: usize,
    pub max_len: usize,
    pub expected_omitted_loops: f64,
    pub msd: f64,
    pub msd_se: f64,
    pub exit_angles: Vec<u64>,
    pub erasure_failures: u64,
    pub max_duration_discrepancy: f64,
    pub mean_duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStatistics {
    pub msd_target: f64,
    pub meshes: Vec<MeshSummary>,
}

fn angle_bin(x: f64, y: f64, bins: usize) -> usize {
    let u = (y.atan2(x) + PI) / (2.0 * PI);
    ((u * bins as f64) as usize).min(bins - 1)
}

struct Draw {
    sq: f64,
    bin: usize,
    erases: bool,
    discrepancy: f64,
    duration: f64,
}

pub fn run(params: &ScalingParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    let [n1, n2] = params.meshes;
    require(n1 >= 1 && n1 < n2, || "meshes must satisfy 1 <= n1 < n2".into())?;
    require(params.time > 0.0 && params.time.is_finite(), || "time must be positive".into())?;
    require(params.angle_bins >= 2, || "at least two angle bins are needed".into())?;
    require(params.replicates >= 2, || "at least two replicates are needed".into())?;
    let target = 2.0 * params.time;
    let mut report = ExperimentReport::new("scaling", params, seed);
    report.replicates = params.replicates;
    report.threshold("msd_tolerance", params.msd_tolerance);
    report.threshold("p_value", params.threshold_p);
    report.threshold("se_factor", params.se_factor);
    report.threshold("tail_budget", params.tail_budget);
    report.threshold("duration_relative", 1e-12);
    let mut meshes = Vec::new();
    for (a, &n) in params.meshes.iter().enumerate() {
        let dom = square_domain(n)?;
        let k = match params.max_len {
            Some(k) => k,
            None => choose_max_len(&dom, params.replicates, params.tail_budget)?,
        };
        let sampler = SoupSampler::new(SamplerKind::Thinning, &dom, k)?;
        let (t, bins) = (params.time, params.angle_bins);
        let draws = runner.try_map(params.replicates, |i| {
            let mut rng = stream(derive_seed(seed, a as u64), i);
            let at = lerw_attach(&dom, &sampler, 1.0, &mut rng)?;
            let vs = at.result.path.vertices().expect("unit lattice attachment").to_vec();
            let exit = *vs.last().unwrap();
            let erases = at.loop_erasure_recovers_gamma();
            let discrepancy = at.duration_discrepancy();
            let scaled = scale_walk(vs, n as f64)?;
            Ok(Draw {
                sq: scaled.eval_clamped(t).norm_sq(),
                bin: angle_bin(exit.x as f64, exit.y as f64, bins),
                erases,
                discrepancy,
                duration: scaled.duration(),
            })
        })?;
        let msd = Moments::from_slice(&draws.iter().map(|d| d.sq).collect::<Vec<_>>());
        let dur = Moments::from_slice(&draws.iter().map(|d| d.duration).collect::<Vec<_>>());
        let mut hist = vec![0u64; bins];
        draws.iter().for_each(|d| hist[d.bin] += 1);
        let omitted = tail_mass(&dom, k) * params.replicates as f64;
        if omitted >= params.tail_budget {
            report.flag(format!("K too small at n = {n}"));
        }
        meshes.push(MeshSummary {
            n,
            max_len: k,
            expected_omitted_loops: omitted,
            msd: msd.mean(),
            msd_se: msd.se(),
            exit_angles: hist,
            erasure_failures: draws.iter().filter(|d| !d.erases).count() as u64,
            max_duration_discrepancy: draws.iter().map(|d| d.discrepancy).fold(0.0, f64::max),
            mean_duration: dur.mean(),
        });
    }
    for m in &meshes {
        let rel = (m.msd - target).abs() / target;
        report.check(
            &format!("msd n={}", m.n),
            rel <= params.msd_tolerance,
            format!("E|X(t)|^2 = {:.5} (se {:.5}) vs {target}, relative error {rel:.4}", m.msd, m.msd_se),
        );
        report.check(
            &format!("loop-erasure n={}", m.n),
            m.erasure_failures == 0,
            format!("{} failures", m.erasure_failures),
        );
        report.check(
            &format!("duration-identity n={}", m.n),
            m.max_duration_discrepancy <= 1e-12,
            format!("largest relative discrepancy {:e}", m.max_duration_discrepancy),
        );
        report.check(
            &format!("truncation n={}", m.n),
            m.expected_omitted_loops < params.tail_budget,
            format!("cut-off {}: {:e} expected omitted loops", m.max_len, m.expected_omitted_loops),
        );
    }
    let (a, b) = (&meshes[0], &meshes[1]);
    let slack = params.se_factor * (a.msd_se * a.msd_se + b.msd_se * b.msd_se).sqrt();
    report.check(
        "msd across meshes",
        (a.msd - b.msd).abs() <= slack,
        format!("{:.5} vs {:.5}, allowed {slack:.5}", a.msd, b.msd),
    );
    let test = chi_square_two_sample(&a.exit_angles, &b.exit_angles);
    report.check(
        "exit angles",
        test.p_value > params.threshold_p,
        format!("chi2 = {:.4} on {} dof, p = {:.6}", test.statistic, test.dof, test.p_value),
    );
    report.test_result = Some(test);
    report.set_statistics(&ScalingStatistics { msd_target: target, meshes });
    Ok(report)
}
