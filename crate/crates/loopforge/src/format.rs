//! JSON representations of paths, soups, configurations and results.

use loopforge_core::attach::{AttachmentResult, TieBreak};
use loopforge_core::lattice::{LatticeDomain, Vertex};
use loopforge_core::metrics::{BilateralFlag, ConfigDistance, IsoMatching, RegularityReport};
use loopforge_core::soup::{LoopSoup, SoupMeta, SoupSource};
use loopforge_core::{Loop, PathKind, Point, SimplePath, TimedPath};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// `{"kind", "mesh", "duration", "samples": [[t, x, y], ...]}`, with
/// `"closed": true` on loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<f64>,
    pub duration: f64,
    pub samples: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
}

const GRID_TOL: f64 = 1e-9;

pub fn path_to_json(p: &TimedPath) -> PathJson {
    let samples = p.samples().map(|(t, q)| [t, q.x, q.y]).collect();
    match p.kind() {
        PathKind::Lattice { mesh, .. } => {
            PathJson { kind: "lattice".into(), mesh: Some(mesh), duration: p.duration(), samples, closed: None }
        }
        PathKind::Continuum => {
            PathJson { kind: "continuum".into(), mesh: None, duration: p.duration(), samples, closed: None }
        }
    }
}

pub fn loop_to_json(l: &Loop) -> PathJson {
    PathJson { closed: Some(true), ..path_to_json(l.path()) }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn path_from_json(j: &PathJson) -> CliResult<TimedPath> {
    if j.samples.is_empty() {
        return Err(invalid("a path needs at least one sample"));
    }
    let last = j.samples.last().unwrap()[0];
    if (last - j.duration).abs() > GRID_TOL * j.duration.abs().max(1.0) {
        return Err(invalid(format!("duration {} differs from the last sample time {last}", j.duration)));
    }
    match j.kind.as_str() {
        "lattice" => {
            let mesh = j.mesh.ok_or_else(|| invalid("lattice paths need a mesh"))?;
            if !(mesh > 0.0 && mesh.is_finite()) {
                return Err(invalid("mesh must be positive"));
            }
            let mut vs = Vec::with_capacity(j.samples.len());
            for s in &j.samples {
                let (x, y) = (s[1] * mesh, s[2] * mesh);
                let (rx, ry) = (x.round(), y.round());
                if (x - rx).abs() > GRID_TOL || (y - ry).abs() > GRID_TOL {
                    return Err(invalid(format!("point ({}, {}) is not on the lattice of mesh {mesh}", s[1], s[2])));
                }
                vs.push(Vertex::new(rx as i32, ry as i32));
            }
            let n = vs.len();
            let step = if n > 1 { j.duration / (n - 1) as f64 } else { 1.0 };
            for (i, s) in j.samples.iter().enumerate() {
                if (s[0] - i as f64 * step).abs() > GRID_TOL * j.duration.max(1.0) {
                    return Err(invalid("lattice sample times must be equally spaced"));
                }
            }
            Ok(TimedPath::lattice(vs, mesh, step)?)
        }
        "continuum" => {
            let s: Vec<(f64, Point)> = j.samples.iter().map(|s| (s[0], Point::new(s[1], s[2]))).collect();
            if s.windows(2).any(|w| w[0].0 == w[1].0) {
                Ok(TimedPath::with_jumps(s)?)
            } else {
                Ok(TimedPath::continuum(s)?)
            }
        }
        other => Err(invalid(format!("unknown path kind {other:?}"))),
    }
}

pub fn loop_from_json(j: &PathJson) -> CliResult<Loop> {
    if j.closed == Some(false) {
        return Err(invalid("a loop must not be marked open"));
    }
    if j.kind == "lattice" && j.samples.len() % 2 == 0 {
        return Err(invalid(format!("lattice loops have even length, got {}", j.samples.len() - 1)));
    }
    Ok(Loop::new(path_from_json(j)?)?)
}

pub fn simple_path_from_json(j: &PathJson) -> CliResult<SimplePath> {
    Ok(SimplePath::new(path_from_json(j)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoupMetaJson {
    pub source: String,
    #[serde(default)]
    pub domain_mesh: Option<f64>,
    #[serde(default)]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub tmin: Option<f64>,
    #[serde(default)]
    pub bridge_step: Option<f64>,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub truncated_mass: Option<f64>,
    #[serde(default)]
    pub truncated_mass_is_bound: bool,
    #[serde(default = "one")]
    pub intensity: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoupJson {
    pub meta: SoupMetaJson,
    pub loops: Vec<PathJson>,
}

fn source_name(s: SoupSource) -> &'static str {
    match s {
        SoupSource::LatticeExact => "lattice-exact",
        SoupSource::LatticeThinning => "lattice-thinning",
        SoupSource::Brownian => "brownian",
        SoupSource::Given => "given",
    }
}

fn source_from_name(s: &str) -> CliResult<SoupSource> {
    Ok(match s {
        "lattice-exact" => SoupSource::LatticeExact,
        "lattice-thinning" => SoupSource::LatticeThinning,
        "brownian" => SoupSource::Brownian,
        "given" => SoupSource::Given,
        other => return Err(invalid(format!("unknown soup source {other:?}"))),
    })
}

pub fn soup_to_json(s: &LoopSoup) -> SoupJson {
    let m = &s.meta;
    SoupJson {
        meta: SoupMetaJson {
            source: source_name(m.source).into(),
            domain_mesh: m.domain_mesh,
            max_len: m.max_len,
            tmin: m.tmin,
            bridge_step: m.bridge_step,
            mass: m.mass,
            truncated_mass: m.truncated_mass,
            truncated_mass_is_bound: m.truncated_mass_is_bound,
            intensity: 1.0,
        },
        loops: s.loops.iter().map(loop_to_json).collect(),
    }
}

pub fn soup_from_json(j: &SoupJson) -> CliResult<LoopSoup> {
    let loops = j.loops.iter().map(loop_from_json).collect::<CliResult<Vec<_>>>()?;
    let m = &j.meta;
    let meta = SoupMeta {
        source: source_from_name(&m.source)?,
        domain_mesh: m.domain_mesh,
        max_len: m.max_len,
        tmin: m.tmin,
        bridge_step: m.bridge_step,
        mass: m.mass,
        truncated_mass: m.truncated_mass,
        truncated_mass_is_bound: m.truncated_mass_is_bound,
    };
    Ok(LoopSoup { loops, meta })
}

/// A path together with a soup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub gamma: PathJson,
    pub soup: SoupJson,
}

/// Lattice domain: `{"box": [w, h]}` or `{"polygon": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Box {
        #[serde(rename = "box")]
        size: [usize; 2],
    },
    Polygon {
        polygon: Vec<[f64; 2]>,
    },
}

impl DomainSpec {
    /// Parse inline JSON, a `WxH` shorthand, or the contents of a file.
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if let Some((w, h)) = s.split_once('x') {
            if let (Ok(w), Ok(h)) = (w.trim().parse(), h.trim().parse()) {
                return Ok(DomainSpec::Box { size: [w, h] });
            }
        }
        let text = if s.starts_with('{') { s.to_string() } else { std::fs::read_to_string(s)? };
        Ok(serde_json::from_str(&text)?)
    }

    /// The lattice domain at the given mesh: a centred box of lattice
    /// vertices, or the vertices of `mesh * polygon` at distance at least
    /// `1/2` from its complement.
    pub fn build(&self, mesh: f64) -> CliResult<LatticeDomain> {
        Ok(match self {
            DomainSpec::Box { size } => LatticeDomain::from_box_mesh(size[0], size[1], mesh)?,
            DomainSpec::Polygon { polygon } => {
                let p: Vec<Point> = polygon.iter().map(|q| Point::new(q[0], q[1])).collect();
                LatticeDomain::from_polygon(&p, mesh)?
            }
        })
    }

    pub fn polygon(&self) -> Option<Vec<Point>> {
        match self {
            DomainSpec::Polygon { polygon } => Some(polygon.iter().map(|q| Point::new(q[0], q[1])).collect()),
            DomainSpec::Box { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieBreakJson {
    pub order: Vec<usize>,
    pub roots: Vec<usize>,
}

impl From<&TieBreak> for TieBreakJson {
    fn from(b: &TieBreak) -> Self {
        TieBreakJson { order: b.order.clone(), roots: b.roots.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachJson {
    pub loop_index: usize,
    pub sigma: f64,
    pub theta: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpJson {
    pub time: f64,
    pub from: [f64; 2],
    pub to: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaJson {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttachmentJson {
    pub x: PathJson,
    pub sigma: SigmaJson,
    pub reach: Vec<ReachJson>,
    pub total_time: f64,
    pub lambda: f64,
    pub jumps: Vec<JumpJson>,
    pub tie_break: TieBreakJson,
}

pub fn attachment_to_json(x: &AttachmentResult, b: &TieBreak) -> AttachmentJson {
    AttachmentJson {
        x: path_to_json(&x.path),
        sigma: SigmaJson { times: x.sigma.times.clone(), values: x.sigma.values.clone() },
        reach: x
            .reach
            .iter()
            .map(|r| ReachJson { loop_index: r.loop_index, sigma: r.sigma, theta: r.theta, start: r.start, end: r.end })
            .collect(),
        total_time: x.total_time,
        lambda: x.lambda,
        jumps: x
            .jumps
            .iter()
            .map(|j| JumpJson { time: j.time, from: [j.from.x, j.from.y], to: [j.to.x, j.to.y] })
            .collect(),
        tie_break: b.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub delta: f64,
    pub pairs: Vec<[usize; 2]>,
}

impl From<&IsoMatching> for WitnessJson {
    fn from(w: &IsoMatching) -> Self {
        WitnessJson { delta: w.delta, pairs: w.pairs.iter().map(|&(a, b)| [a, b]).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistJson {
    pub rho: f64,
    pub rho_error_bound: f64,
    pub d: f64,
    pub dt: f64,
    pub domega: f64,
    #[serde(rename = "d_R0")]
    pub d_r0: f64,
    #[serde(rename = "d_R0_weak")]
    pub d_r0_weak: f64,
    pub witness: WitnessJson,
}

impl From<&ConfigDistance> for DistJson {
    fn from(c: &ConfigDistance) -> Self {
        DistJson {
            rho: c.rho,
            rho_error_bound: c.rho_error_bound,
            d: c.d,
            dt: c.dt,
            domega: c.domega,
            d_r0: c.d_r0,
            d_r0_weak: c.d_r0_weak,
            witness: (&c.witness).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitSideJson {
    pub loop_index: usize,
    pub flag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityJson {
    pub total_time: f64,
    pub total_time_finite: bool,
    pub equicontinuity_profile: Vec<[f64; 2]>,
    pub sigma_injective: bool,
    pub sigma_collisions: Vec<[usize; 2]>,
    pub roots_unique: bool,
    pub multi_root_loops: Vec<usize>,
    pub density_gap: Vec<[f64; 2]>,
    pub bilateral_flags: Vec<HitSideJson>,
}

pub fn flag_name(f: BilateralFlag) -> &'static str {
    match f {
        BilateralFlag::Bilateral => "bilateral",
        BilateralFlag::OneSidedLeft => "one-sided-left",
        BilateralFlag::OneSidedRight => "one-sided-right",
        BilateralFlag::OnPath => "on-path",
        BilateralFlag::EndpointRoot => "endpoint-root",
        BilateralFlag::NotEvaluated => "not-evaluated",
    }
}

impl From<&RegularityReport> for RegularityJson {
    fn from(r: &RegularityReport) -> Self {
        RegularityJson {
            total_time: r.total_time,
            total_time_finite: r.total_time_finite,
            equicontinuity_profile: r.equicontinuity.iter().map(|&(d, w)| [d, w]).collect(),
            sigma_injective: r.sigma_injective,
            sigma_collisions: r.sigma_collisions.iter().map(|&(a, b)| [a, b]).collect(),
            roots_unique: r.roots_unique,
            multi_root_loops: r.multi_root_loops.clone(),
            density_gap: r.density_gap.iter().map(|&(d, g)| [d, g]).collect(),
            bilateral_flags: r
                .bilateral
                .iter()
                .map(|h| HitSideJson { loop_index: h.loop_index, flag: flag_name(h.flag).into() })
                .collect(),
        }
    }
}

/// Every artifact is wrapped with the tool version, the run configuration
/// and the master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<C, T> {
    pub version: String,
    pub config: C,
    pub seed: u64,
    #[serde(flatten)]
    pub payload: T,
}

impl<C, T> Envelope<C, T> {
    pub fn new(config: C, seed: u64, payload: T) -> Self {
        Envelope { version: env!("CARGO_PKG_VERSION").into(), config, seed, payload }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        let p = TimedPath::lattice(vec![Vertex::new(0, 0), Vertex::new(1, 0), Vertex::new(1, 1)], 4.0, 0.125).unwrap();
        let j = path_to_json(&p);
        assert_eq!(j.mesh, Some(4.0));
        assert_eq!(j.samples[1], [0.125, 0.25, 0.0]);
        assert_eq!(path_from_json(&j).unwrap(), p);
    }

    #[test]
    fn continuum_round_trip_through_text() {
        let p = TimedPath::continuum(vec![(0.0, Point::ORIGIN), (0.3, Point::new(0.1, -2.0))]).unwrap();
        let text = serde_json::to_string(&path_to_json(&p)).unwrap();
        let back: PathJson = serde_json::from_str(&text).unwrap();
        assert_eq!(path_from_json(&back).unwrap(), p);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let off = PathJson {
            kind: "lattice".into(),
            mesh: Some(1.0),
            duration: 1.0,
            samples: vec![[0.0, 0.0, 0.0], [1.0, 0.5, 0.0]],
            closed: None,
        };
        assert!(path_from_json(&off).is_err());
        let jump = PathJson {
            kind: "lattice".into(),
            mesh: Some(1.0),
            duration: 1.0,
            samples: vec![[0.0, 0.0, 0.0], [1.0, 2.0, 0.0]],
            closed: None,
        };
        assert!(path_from_json(&jump).is_err());
        let open = PathJson {
            kind: "lattice".into(),
            mesh: Some(1.0),
            duration: 1.0,
            samples: vec![[0.0, 0.0, 0.0], [1.0, 1.0, 0.0]],
            closed: Some(true),
        };
        assert!(loop_from_json(&open).is_err());
        let nonsimple = PathJson {
            kind: "lattice".into(),
            mesh: Some(1.0),
            duration: 2.0,
            samples: vec![[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [2.0, 0.0, 0.0]],
            closed: None,
        };
        assert!(simple_path_from_json(&nonsimple).is_err());
        let kind =
            PathJson { kind: "spline".into(), mesh: None, duration: 0.0, samples: vec![[0.0, 0.0, 0.0]], closed: None };
        assert!(path_from_json(&kind).is_err());
    }

    #[test]
    fn domain_specs() {
        assert_eq!(DomainSpec::parse("3x5").unwrap(), DomainSpec::Box { size: [3, 5] });
        assert_eq!(DomainSpec::parse(r#"{"box":[7,7]}"#).unwrap(), DomainSpec::Box { size: [7, 7] });
        let p = DomainSpec::parse(r#"{"polygon":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#).unwrap();
        assert_eq!(p.build(4.0).unwrap().len(), 49);
        assert!(DomainSpec::parse("{nope").is_err());
    }
}
