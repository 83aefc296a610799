//! Equality in law of the attached loop-erased walk and the simple random
//! walk, tested on path prefixes.

use loopforge_core::lattice::{sample_srw, Vertex};
use loopforge_core::rng::{derive_seed, stream};
use serde::{Deserialize, Serialize};

use super::{require, DIRECTIONS};
use crate::error::CliResult;
use crate::format::DomainSpec;
use crate::pipeline::{choose_max_len, lerw_attach, tail_mass, SamplerKind, SoupSampler};
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::{chi_square_two_sample, Moments};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SrwParams {
    pub domain: DomainSpec,
    pub mesh: f64,
    /// Loop length cut-off; chosen by the tail rule when absent.
    pub max_len: Option<usize>,
    pub prefix_len: usize,
    pub replicates: u64,
    pub threshold_p: f64,
    /// Largest admissible expected number of omitted loops over all replicates.
    pub tail_budget: f64,
    pub sampler: SamplerKind,
}

impl Default for SrwParams {
    fn default() -> Self {
        SrwParams {
            domain: DomainSpec::Box { size: [3, 3] },
            mesh: 1.0,
            max_len: None,
            prefix_len: 4,
            replicates: 200_000,
            threshold_p: 1e-3,
            tail_budget: 1e-2,
            sampler: SamplerKind::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixCell {
    pub prefix: String,
    pub attached: u64,
    pub srw: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrwStatistics {
    pub max_len: usize,
    pub max_len_chosen: bool,
    pub truncated_mass: f64,
    pub expected_omitted_loops: f64,
    pub cells: Vec<PrefixCell>,
    pub erasure_failures: u64,
    pub max_duration_discrepancy: f64,
    pub mean_steps_attached: f64,
    pub mean_steps_srw: f64,
    pub mean_hit_loops: f64,
}

/// Number of prefix cells `sum_{s=1}^{P} 4^s`.
fn cell_count(p: usize) -> usize {
    (4usize.pow(p as u32 + 1) - 4) / 3
}

/// Cell of a walk: its full step sequence if it has at most `p` steps,
/// otherwise its first `p` steps.
pub fn prefix_cell(vs: &[Vertex], p: usize) -> usize {
    let s = (vs.len() - 1).min(p);
    let mut code = 0usize;
    for w in vs[..=s].windows(2) {
        code = 4 * code + w[0].direction_to(w[1]).expect("nearest-neighbour step");
    }
    cell_count(s.saturating_sub(1)) + code
}

fn cell_label(mut c: usize, p: usize) -> String {
    let mut s = 1;
    while s < p && c >= 4usize.pow(s as u32) {
        c -= 4usize.pow(s as u32);
        s += 1;
    }
    let mut out = vec!['?'; s];
    for i in (0..s).rev() {
        out[i] = DIRECTIONS[c % 4];
        c /= 4;
    }
    out.into_iter().collect()
}

struct AttachedDraw {
    cell: usize,
    erases: bool,
    discrepancy: f64,
    steps: usize,
    hits: usize,
}

pub fn run(params: &SrwParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    require(params.prefix_len >= 1 && params.prefix_len <= 8, || "prefix_len must lie in 1..=8".into())?;
    require(params.replicates >= 1, || "replicates must be positive".into())?;
    require(params.threshold_p > 0.0 && params.threshold_p < 1.0, || "threshold_p must lie in (0, 1)".into())?;
    let dom = params.domain.build(params.mesh)?;
    let n = params.replicates;
    let p = params.prefix_len;
    let (max_len, chosen) = match params.max_len {
        Some(k) => (k, false),
        None => (choose_max_len(&dom, n, params.tail_budget)?, true),
    };
    require(max_len >= 2 && max_len % 2 == 0, || "max_len must be an even number of at least 2".into())?;
    let sampler = SoupSampler::new(params.sampler, &dom, max_len)?;
    let tail = tail_mass(&dom, max_len);

    let attached = runner.try_map(n, |i| {
        let mut rng = stream(derive_seed(seed, 0), i);
        let a = lerw_attach(&dom, &sampler, 1.0, &mut rng)?;
        let vs = a.result.path.vertices().expect("unit lattice attachment");
        Ok(AttachedDraw {
            cell: prefix_cell(vs, p),
            erases: a.loop_erasure_recovers_gamma(),
            discrepancy: a.duration_discrepancy(),
            steps: vs.len() - 1,
            hits: a.config.hits().len(),
        })
    })?;
    let direct = runner.try_map(n, |i| {
        let mut rng = stream(derive_seed(seed, 1), i);
        let vs = sample_srw(&dom, &mut rng)?;
        Ok((prefix_cell(&vs, p), vs.len() - 1))
    })?;

    let cells = cell_count(p);
    let mut ca = vec![0u64; cells];
    let mut cb = vec![0u64; cells];
    let (mut la, mut lb, mut hits) = (Moments::default(), Moments::default(), Moments::default());
    let mut erasure_failures = 0;
    let mut worst = 0.0f64;
    for d in &attached {
        ca[d.cell] += 1;
        la.push(d.steps as f64);
        hits.push(d.hits as f64);
        erasure_failures += u64::from(!d.erases);
        worst = worst.max(d.discrepancy);
    }
    for &(c, s) in &direct {
        cb[c] += 1;
        lb.push(s as f64);
    }
    let test = chi_square_two_sample(&ca, &cb);

    let mut report = ExperimentReport::new("srw", params, seed);
    report.replicates = n;
    report.threshold("p_value", params.threshold_p);
    report.threshold("tail_budget", params.tail_budget);
    report.threshold("duration_relative", 1e-12);
    report.check(
        "prefix-law",
        test.p_value > params.threshold_p,
        format!("chi2 = {:.4} on {} dof, p = {:.6}", test.statistic, test.dof, test.p_value),
    );
    report.check(
        "loop-erasure",
        erasure_failures == 0,
        format!("{erasure_failures} of {n} attachments do not erase to their path"),
    );
    report.check("duration-identity", worst <= 1e-12, format!("largest relative discrepancy {worst:e}"));
    let expected_omitted = tail * n as f64;
    let truncation_ok = expected_omitted < params.tail_budget;
    report.check(
        "truncation",
        truncation_ok,
        format!("cut-off {max_len}: {expected_omitted:e} expected omitted loops over all replicates"),
    );
    if !truncation_ok {
        report.flag("K too small");
    }
    if (n as f64) / 4f64.powi(p as i32) < 5.0 {
        report.flag("prefix cells have expected counts below 5; sparse cells are pooled");
    }
    report.test_result = Some(test);
    report.set_statistics(&SrwStatistics {
        max_len,
        max_len_chosen: chosen,
        truncated_mass: tail,
        expected_omitted_loops: expected_omitted,
        cells: (0..cells)
            .filter(|&c| ca[c] + cb[c] > 0)
            .map(|c| PrefixCell { prefix: cell_label(c, p), attached: ca[c], srw: cb[c] })
            .collect(),
        erasure_failures,
        max_duration_discrepancy: worst,
        mean_steps_attached: la.mean(),
        mean_steps_srw: lb.mean(),
        mean_hit_loops: hits.mean(),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(dirs: &[usize]) -> Vec<Vertex> {
        let mut v = vec![Vertex::ORIGIN];
        for &d in dirs {
            v.push(v.last().unwrap().step(d));
        }
        v
    }

    #[test]
    fn cells_are_distinct_and_labelled() {
        let p = 3;
        let mut seen = std::collections::BTreeSet::new();
        for len in 1..=3 {
            for code in 0..4usize.pow(len as u32) {
                let dirs: Vec<usize> = (0..len).rev().map(|i| (code >> (2 * i)) & 3).collect();
                let c = prefix_cell(&walk(&dirs), p);
                assert!(c < cell_count(p));
                assert!(seen.insert(c));
                let label: String = dirs.iter().map(|&d| DIRECTIONS[d]).collect();
                assert_eq!(cell_label(c, p), label);
            }
        }
        assert_eq!(prefix_cell(&walk(&[1, 1, 2, 3, 0]), p), prefix_cell(&walk(&[1, 1, 2]), p));
    }

    #[test]
    fn single_vertex_domain_gives_uniform_first_steps() {
        let params = SrwParams {
            domain: DomainSpec::Box { size: [1, 1] },
            prefix_len: 2,
            replicates: 4000,
            ..Default::default()
        };
        let r = run(&params, 1, &Runner::new(Some(2)).unwrap()).unwrap();
        let st: SrwStatistics = serde_json::from_value(r.statistics.clone()).unwrap();
        assert_eq!(st.cells.len(), 4);
        assert!(st.cells.iter().all(|c| c.prefix.len() == 1));
        assert_eq!(st.max_len, 2);
        assert!(r.passed, "{:?}", r.checks);
    }

    #[test]
    fn reports_are_reproducible_and_job_independent() {
        let params = SrwParams { replicates: 2000, ..Default::default() };
        let a = run(&params, 9, &Runner::new(Some(1)).unwrap()).unwrap();
        let b = run(&params, 9, &Runner::new(Some(3)).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn user_cut_off_below_the_tail_rule_is_flagged() {
        let params = SrwParams { replicates: 500, max_len: Some(2), ..Default::default() };
        let r = run(&params, 2, &Runner::single_threaded()).unwrap();
        assert!(r.flags.iter().any(|f| f == "K too small"));
        assert!(!r.passed);
    }
}
