//! CSV tables and SVG charts derived from experiment reports.
//!
//! Both are pure functions of the report, so they can be regenerated from a
//! saved report file.

use std::fmt::Write;

use serde::Serialize;

use crate::error::CliResult;
use crate::experiments::{intensity, neighborhood, scaling, smallloop, srw, tail};
use crate::report::ExperimentReport;

fn rows_to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct HistRow {
    n: usize,
    bin: usize,
    count: u64,
}

/// The main table of a report as CSV.
pub fn report_csv(r: &ExperimentReport) -> CliResult<String> {
    let st = r.statistics.clone();
    match r.name.as_str() {
        "srw" => rows_to_csv(&serde_json::from_value::<srw::SrwStatistics>(st)?.cells),
        "intensity" => rows_to_csv(&serde_json::from_value::<intensity::IntensityStatistics>(st)?.rows),
        "tail" => rows_to_csv(&serde_json::from_value::<tail::TailStatistics>(st)?.rows),
        "smallloop" => rows_to_csv(&serde_json::from_value::<smallloop::SmallLoopStatistics>(st)?.surface),
        "neighborhood" => rows_to_csv(&serde_json::from_value::<neighborhood::NeighborhoodStatistics>(st)?.rows),
        "scaling" => {
            let s: scaling::ScalingStatistics = serde_json::from_value(st)?;
            let rows: Vec<HistRow> = s
                .meshes
                .iter()
                .flat_map(|m| m.exit_angles.iter().enumerate().map(|(bin, &count)| HistRow { n: m.n, bin, count }))
                .collect();
            rows_to_csv(&rows)
        }
        other => Err(crate::error::CliError::Invalid(format!("no table for report {other:?}"))),
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN);
    let _ = writeln!(s, "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>");
    let font = "font-family=\"sans-serif\" font-size=\"11\"";
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {font}>{}</text>",
        (x0 + x1) / 2.0,
        H - 18.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\" {font}>{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    for (v, px) in [(x.0, x0), (x.1, x1)] {
        let _ = writeln!(s, "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" {font}>{}</text>", y0 + 14.0, tick(v));
    }
    for (v, py) in [(y.0, y0), (y.1, y1)] {
        let _ =
            writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" {font}>{}</text>", x0 - 4.0, py + 4.0, tick(v));
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn legend(s: &mut String, names: &[String]) {
    for (i, n) in names.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let c = COLOURS[i % COLOURS.len()];
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{c}\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            W - 150.0,
            y - 9.0,
            W - 136.0,
            y,
            escape(n)
        );
    }
}

/// Polyline chart of several `(x, y)` series.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let xr = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 1.5 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);
    let mut s = header(title);
    axes(&mut s, xlabel, ylabel, xr, yr);
    for (i, (_, pts)) in series.iter().enumerate() {
        let c = COLOURS[i % COLOURS.len()];
        let d: Vec<String> = pts
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .enumerate()
            .map(|(j, p)| format!("{}{:.2} {:.2}", if j == 0 { 'M' } else { 'L' }, px(p.0), py(p.1)))
            .collect();
        let _ = writeln!(s, "<path d=\"{}\" stroke=\"{c}\" stroke-width=\"2\" fill=\"none\"/>", d.join(" "));
        for p in pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>", px(p.0), py(p.1));
        }
    }
    legend(&mut s, &series.iter().map(|x| x.0.clone()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Grouped bar chart: one group per label, one bar per series.
pub fn bar_chart(title: &str, ylabel: &str, labels: &[String], series: &[(String, Vec<f64>)]) -> String {
    let top = series.iter().flat_map(|s| s.1.iter().copied()).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let top = if top > 0.0 { top } else { 1.0 };
    let groups = labels.len().max(1) as f64;
    let gw = (W - 1.5 * MARGIN) / groups;
    let bw = gw * 0.8 / series.len().max(1) as f64;
    let mut s = header(title);
    axes(&mut s, "", ylabel, (0.0, groups), (0.0, top));
    for (i, (_, vals)) in series.iter().enumerate() {
        let c = COLOURS[i % COLOURS.len()];
        for (g, &v) in vals.iter().enumerate() {
            let h = (v.max(0.0) / top) * (H - 2.0 * MARGIN);
            let x = MARGIN + g as f64 * gw + 0.1 * gw + i as f64 * bw;
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{bw:.2}\" height=\"{h:.2}\" fill=\"{c}\"/>",
                H - MARGIN - h
            );
        }
    }
    if labels.len() <= 32 {
        for (g, l) in labels.iter().enumerate() {
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">{}</text>",
                MARGIN + (g as f64 + 0.5) * gw,
                H - MARGIN + 26.0,
                escape(l)
            );
        }
    }
    legend(&mut s, &series.iter().map(|x| x.0.clone()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// The chart of a report.
pub fn report_svg(r: &ExperimentReport) -> CliResult<String> {
    let st = r.statistics.clone();
    Ok(match r.name.as_str() {
        "srw" => {
            let s: srw::SrwStatistics = serde_json::from_value(st)?;
            let (ta, tb) =
                (s.cells.iter().map(|c| c.attached).sum::<u64>(), s.cells.iter().map(|c| c.srw).sum::<u64>());
            let mut cells = s.cells.clone();
            cells.sort_by(|a, b| (b.attached + b.srw).cmp(&(a.attached + a.srw)).then(a.prefix.cmp(&b.prefix)));
            cells.truncate(24);
            bar_chart(
                "Most frequent prefixes",
                "frequency",
                &cells.iter().map(|c| c.prefix.clone()).collect::<Vec<_>>(),
                &[
                    ("attached".into(), cells.iter().map(|c| c.attached as f64 / ta.max(1) as f64).collect()),
                    ("simple walk".into(), cells.iter().map(|c| c.srw as f64 / tb.max(1) as f64).collect()),
                ],
            )
        }
        "intensity" => {
            let s: intensity::IntensityStatistics = serde_json::from_value(st)?;
            bar_chart(
                "Rooted loops at the origin",
                "mean count",
                &s.rows.iter().map(|r| format!("k={}", r.k)).collect::<Vec<_>>(),
                &[
                    ("empirical".into(), s.rows.iter().map(|r| r.mean).collect()),
                    ("target".into(), s.rows.iter().map(|r| r.target).collect()),
                ],
            )
        }
        "tail" => {
            let s: tail::TailStatistics = serde_json::from_value(st)?;
            let pts = |f: fn(&tail::TailRow) -> f64| -> Vec<(f64, f64)> {
                s.rows.iter().filter(|t| f(t) > 0.0).map(|t| (t.r * t.r, f(t).ln())).collect()
            };
            line_chart(
                "Range tail of plane bridges",
                "R^2",
                "log survival",
                &[("empirical".into(), pts(|t| t.survival)), ("exact".into(), pts(|t| t.exact))],
            )
        }
        "smallloop" => {
            let s: smallloop::SmallLoopStatistics = serde_json::from_value(st)?;
            let mut ns: Vec<usize> = s.surface.iter().map(|c| c.n).collect();
            ns.dedup();
            let series: Vec<(String, Vec<(f64, f64)>)> = ns
                .iter()
                .map(|&n| {
                    (
                        format!("n={n}"),
                        s.surface.iter().filter(|c| c.n == n).map(|c| (c.delta.log2(), c.mean)).collect(),
                    )
                })
                .collect();
            line_chart("Small-loop time", "log2 delta", "mean T", &series)
        }
        "neighborhood" => {
            let s: neighborhood::NeighborhoodStatistics = serde_json::from_value(st)?;
            line_chart(
                "Neighbourhood cardinality",
                "log k",
                "log mean",
                &[("mean".into(), s.rows.iter().map(|r| ((r.k as f64).ln(), r.mean.ln())).collect())],
            )
        }
        "scaling" => {
            let s: scaling::ScalingStatistics = serde_json::from_value(st)?;
            let bins = s.meshes.first().map_or(0, |m| m.exit_angles.len());
            bar_chart(
                "Exit angle histogram",
                "frequency",
                &(0..bins).map(|b| b.to_string()).collect::<Vec<_>>(),
                &s.meshes
                    .iter()
                    .map(|m| {
                        let t = m.exit_angles.iter().sum::<u64>().max(1) as f64;
                        (format!("n={}", m.n), m.exit_angles.iter().map(|&c| c as f64 / t).collect())
                    })
                    .collect::<Vec<_>>(),
            )
        }
        other => return Err(crate::error::CliError::Invalid(format!("no chart for report {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let s = line_chart("t", "x", "y", &[("a".into(), vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(!s.contains("NaN"));
        let b = bar_chart("t", "y", &["a<b".into()], &[("s".into(), vec![2.0])]);
        assert!(b.contains("a&lt;b"));
    }
}
