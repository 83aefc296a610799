//! Range tail of rooted plane bridges: `P(r_L >= R sqrt(k))` with
//! `r_L = max_t |L(t) - L(0)|`.

use loopforge_core::lattice::Vertex;
use loopforge_core::rng::{derive_seed, stream};
use loopforge_core::soup::sample_plane_bridge;
use serde::{Deserialize, Serialize};

use super::require;
use crate::error::CliResult;
use crate::report::ExperimentReport;
use crate::runner::Runner;
use crate::stats::linear_fit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailParams {
    pub k: usize,
    pub r_grid: Vec<f64>,
    pub replicates: u64,
    /// Largest admissible slope of `log P` against `R^2`.
    pub max_slope: f64,
    pub se_factor: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        TailParams { k: 16, r_grid: vec![0.0, 1.0, 1.5, 2.0], replicates: 1_000_000, max_slope: -0.5, se_factor: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    pub radius: f64,
    pub exceed: u64,
    pub survival: f64,
    pub se: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailStatistics {
    pub rows: Vec<TailRow>,
    /// Grid values with no sample in the tail, left out of the fit.
    pub dropped: Vec<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

/// Exact `P(r_L >= radius)` for a uniform length-`k` bridge of `Z^2`, from the
/// number of bridges whose vertices all satisfy `|v| < radius`.
pub fn exact_survival(k: usize, radius: f64) -> f64 {
    let h = (k / 2) as i32;
    let side = (2 * h + 1) as usize;
    let inside = |x: i32, y: i32| ((x * x + y * y) as f64) < radius * radius;
    let idx = |x: i32, y: i32| ((y + h) as usize) * side + (x + h) as usize;
    let mut cur = vec![0u128; side * side];
    if !inside(0, 0) {
        return 1.0;
    }
    cur[idx(0, 0)] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; side * side];
        for y in -h..=h {
            for x in -h..=h {
                let c = cur[idx(x, y)];
                if c == 0 {
                    continue;
                }
                for d in 0..4 {
                    let w = Vertex::new(x, y).step(d);
                    if w.x.abs() <= h && w.y.abs() <= h && inside(w.x, w.y) {
                        next[idx(w.x, w.y)] += c;
                    }
                }
            }
        }
        cur = next;
    }
    let mut total = 1u128;
    for i in 0..h as u128 {
        total = total * (k as u128 - i) / (i + 1);
    }
    1.0 - cur[idx(0, 0)] as f64 / (total * total) as f64
}

pub fn run(params: &TailParams, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    let k = params.k;
    require(k >= 2 && k % 2 == 0 && k <= 40, || format!("bridge length {k} must be even and lie in 2..=40"))?;
    require(!params.r_grid.is_empty(), || "the R grid is empty".into())?;
    require(params.r_grid.iter().all(|r| r.is_finite() && *r >= 0.0), || "R values must be non-negative".into())?;
    require(params.replicates >= 1, || "replicates must be positive".into())?;
    let ranges = runner.map(params.replicates, |i| {
        let mut rng = stream(derive_seed(seed, 0), i);
        let b = sample_plane_bridge(Vertex::ORIGIN, k, &mut rng);
        b.iter().map(|v| v.dist_sq(Vertex::ORIGIN)).max().unwrap_or(0)
    });
    let n = params.replicates as f64;
    let sk = (k as f64).sqrt();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for &r in &params.r_grid {
        let radius = r * sk;
        let exceed = ranges.iter().filter(|&&d2| (d2 as f64) >= radius * radius).count() as u64;
        let s = exceed as f64 / n;
        if exceed == 0 {
            dropped.push(r);
        }
        rows.push(TailRow {
            r,
            radius,
            exceed,
            survival: s,
            se: (s * (1.0 - s) / n).sqrt(),
            exact: exact_survival(k, radius),
        });
    }
    let fit_rows: Vec<&TailRow> = rows.iter().filter(|t| t.r > 0.0 && t.exceed > 0).collect();
    let xs: Vec<f64> = fit_rows.iter().map(|t| t.r * t.r).collect();
    let ys: Vec<f64> = fit_rows.iter().map(|t| t.survival.ln()).collect();
    let fit = linear_fit(&xs, &ys);

    let mut report = ExperimentReport::new("tail", params, seed);
    report.replicates = params.replicates;
    report.threshold("max_slope", params.max_slope);
    report.threshold("se_factor", params.se_factor);
    match fit {
        Some((_, b)) => report.check(
            "slope",
            b <= params.max_slope,
            format!("log-survival slope against R^2 is {b:.4} over {} cells", fit_rows.len()),
        ),
        None => report.check("slope", false, "fewer than two non-empty cells with R > 0"),
    }
    let monotone = rows.windows(2).all(|w| (w[1].r < w[0].r) || w[1].survival <= w[0].survival);
    report.check("monotone", monotone, "survival is non-increasing in R");
    for t in rows.iter().filter(|t| t.r == 0.0) {
        report.check("R=0", t.survival == 1.0, format!("survival {}", t.survival));
    }
    for t in &rows {
        let se = (t.exact * (1.0 - t.exact) / n).sqrt();
        let ok = (t.survival - t.exact).abs() <= params.se_factor * se + 0.5 / n;
        report.check(
            &format!("exact R={}", t.r),
            ok,
            format!("empirical {:.6} vs exact {:.6} (se {se:.2e})", t.survival, t.exact),
        );
    }
    if !dropped.is_empty() {
        report.flag(format!("empty tail cells dropped at R = {dropped:?}"));
    }
    report.set_statistics(&TailStatistics { rows, dropped, slope: fit.map(|f| f.1), intercept: fit.map(|f| f.0) });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_survival_small_cases() {
        // every 2-step bridge reaches distance 1
        assert_eq!(exact_survival(2, 1.0), 1.0);
        assert_eq!(exact_survival(2, 1.5), 0.0);
        assert_eq!(exact_survival(4, 0.0), 1.0);
        // of the 36 four-step bridges, the 4 straight out-and-back ones reach 2
        assert!((exact_survival(4, 2.0) - 4.0 / 36.0).abs() < 1e-15);
        // |v| >= sqrt 2 is also reached by the 8 square circuits and the 8 bridges
        // that step sideways and retrace
        assert!((exact_survival(4, 1.2) - 20.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn survival_decreases_along_the_grid() {
        let p = TailParams { replicates: 20_000, ..Default::default() };
        let r = run(&p, 5, &Runner::new(Some(2)).unwrap()).unwrap();
        let st: TailStatistics = serde_json::from_value(r.statistics).unwrap();
        assert_eq!(st.rows[0].survival, 1.0);
        assert!(st.rows.windows(2).all(|w| w[1].survival <= w[0].survival));
    }
}
