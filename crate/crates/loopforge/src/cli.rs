//! The `loopforge` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopforge_core::attach::{attach, enumerate_tie_breaks, AttachOptions, TieBreak};
use loopforge_core::lattice::{
    sample_killed_conditioned, sample_killed_lerw, sample_lerw, sample_srw, scale_lerw, scale_walk, DEFAULT_C_STAR,
    DEFAULT_REJECTION_BUDGET,
};
use loopforge_core::metrics::{config_distance, regularity_check};
use loopforge_core::rng::{derive_seed, stream};
use loopforge_core::soup::{build_configuration, thin_massive, BrownianSoupSampler, Configuration};
use loopforge_core::{Point, TimedPath};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::experiments::{intensity, neighborhood, scaling, smallloop, srw, tail};
use crate::format::{
    attachment_to_json, loop_to_json, path_to_json, simple_path_from_json, soup_from_json, soup_to_json, ConfigJson,
    DistJson, DomainSpec, Envelope, PathJson, RegularityJson, SoupJson,
};
use crate::pipeline::{lattice_gamma, SamplerKind, SoupSampler};
use crate::plot::{report_csv, report_svg};
use crate::report::ExperimentReport;
use crate::runner::Runner;

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "LOOPFORGE_SEED";

#[derive(Debug, Parser, Serialize)]
#[command(name = "loopforge", version, about = "Loop soups, loop-erased walks and their chronological attachment")]
pub struct Cli {
    /// Master seed; falls back to $LOOPFORGE_SEED, then 0.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Sample a random walk or Brownian loop soup.
    Soup(SoupArgs),
    /// Sample a loop-erased random walk from the origin.
    Lerw(WalkArgs),
    /// Sample a simple random walk from the origin to its exit.
    Srw(WalkArgs),
    /// Attach the soup of a configuration to its path.
    Attach(AttachArgs),
    /// Distances between two configurations.
    Dist(DistArgs),
    /// Regularity diagnostics of a configuration.
    Regularity(RegularityArgs),
    /// Run a statistical verification experiment.
    Verify(VerifyArgs),
    /// Run the whole pipeline at a tiny preset.
    Demo,
}

#[derive(Debug, Args, Serialize)]
pub struct DomainArgs {
    /// `{"box":[w,h]}`, `{"polygon":[[x,y],...]}`, `WxH`, or a JSON file.
    #[arg(long, default_value = "9x9")]
    pub domain: String,
    #[arg(long, default_value_t = 1.0)]
    pub mesh: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SoupArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 16)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value_t = SamplerKind::Exact)]
    pub sampler: SamplerKind,
    /// Thin the soup to the massive soup of this mass.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Brownian loop soup in the continuum domain.
    #[arg(long)]
    pub continuum: bool,
    #[arg(long, default_value_t = 0.05)]
    pub tmin: f64,
    #[arg(long, default_value_t = 0.005)]
    pub bridge_step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub domain: DomainArgs,
    /// Kill at rate `mass^2 / (2 n^2)` per step and condition on exiting.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Time constant of the loop-erased scaling.
    #[arg(long, default_value_t = DEFAULT_C_STAR)]
    pub c_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreakChoice {
    Uniform,
    First,
}

#[derive(Debug, Args, Serialize)]
pub struct AttachArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = TieBreakChoice::Uniform)]
    pub tie_break: TieBreakChoice,
    /// Accept `lambda = 0` when the first-hit times leave gaps.
    #[arg(long)]
    pub allow_jumps: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub rho_grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RegularityArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Srw,
    Intensity,
    Tail,
    Smallloop,
    Neighborhood,
    Scaling,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// JSON file with experiment parameters; flags below override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub replicates: Option<u64>,
    #[arg(long)]
    pub prefix_len: Option<usize>,
    #[arg(long)]
    pub threshold_p: Option<f64>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub mesh: Option<f64>,
    /// Comma-separated mesh list.
    #[arg(long, value_delimiter = ',')]
    pub meshes: Option<Vec<usize>>,
    /// Comma-separated loop lengths or radii.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerKind>,
    /// Also write the report table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write the report chart as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// What a subcommand produced.
struct Output {
    json: String,
    passed: bool,
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(p).map_err(|source| CliError::File { path: p.into(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn write_file(p: &Path, s: &str) -> CliResult<()> {
    std::fs::write(p, s).map_err(|source| CliError::File { path: p.into(), source })
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return 2;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => write_file(p, &out.json),
                None => std::io::stdout().write_all(out.json.as_bytes()).map_err(CliError::from),
            };
            if let Err(e) = written {
                eprintln!("{}", e.to_json());
                return 2;
            }
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            2
        }
    }
}

#[derive(Serialize)]
struct RunConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: &'a Option<PathBuf>,
}

fn envelope<T: Serialize>(cli: &Cli, seed: u64, payload: T) -> CliResult<String> {
    to_json(&Envelope::new(RunConfig { command: &cli.command, out: &cli.out }, seed, payload))
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let seed = resolve_seed(cli.seed)?;
    let ok = |json| Ok(Output { json, passed: true });
    match &cli.command {
        Command::Soup(a) => ok(envelope(cli, seed, soup_command(a, seed)?)?),
        Command::Lerw(a) => ok(envelope(cli, seed, walk_command(a, seed, true)?)?),
        Command::Srw(a) => ok(envelope(cli, seed, walk_command(a, seed, false)?)?),
        Command::Attach(a) => {
            let cfg = load_config(&a.config)?;
            let b = match a.tie_break {
                TieBreakChoice::First => TieBreak::default_for(&cfg),
                TieBreakChoice::Uniform => enumerate_tie_breaks(&cfg).sample_uniform(&mut stream(seed, 0)),
            };
            let opts = AttachOptions { allow_jumps: a.allow_jumps, ..Default::default() };
            let x = attach(&cfg, a.lambda, &b, opts)?;
            ok(envelope(cli, seed, attachment_to_json(&x, &b))?)
        }
        Command::Dist(a) => {
            if a.rho_grid < 2 {
                return Err(CliError::Invalid("--rho-grid must be at least 2".into()));
            }
            let (x, y) = (load_config(&a.a)?, load_config(&a.b)?);
            ok(envelope(cli, seed, DistJson::from(&config_distance(&x, &y, a.rho_grid)))?)
        }
        Command::Regularity(a) => {
            let cfg = load_config(&a.config)?;
            ok(envelope(cli, seed, RegularityJson::from(&regularity_check(&cfg)))?)
        }
        Command::Verify(a) => {
            let runner = Runner::new(cli.jobs)?;
            let report = verify_command(a, seed, &runner)?;
            if let Some(p) = &a.csv {
                write_file(p, &report_csv(&report)?)?;
            }
            if let Some(p) = &a.svg {
                write_file(p, &report_svg(&report)?)?;
            }
            let passed = report.passed;
            Ok(Output { json: envelope(cli, seed, VerifyOutput { report })?, passed })
        }
        Command::Demo => {
            let runner = Runner::new(cli.jobs)?;
            let d = demo(seed, &runner)?;
            let passed = d.passed;
            Ok(Output { json: envelope(cli, seed, d)?, passed })
        }
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    report: ExperimentReport,
}

/// Read `{"gamma": ..., "soup": ...}` and build the configuration.
pub fn load_config(p: &Path) -> CliResult<Configuration> {
    let c: ConfigJson = read_json(p)?;
    config_from_json(&c)
}

pub fn config_from_json(c: &ConfigJson) -> CliResult<Configuration> {
    let gamma = simple_path_from_json(&c.gamma)?;
    let soup = soup_from_json(&c.soup)?;
    Ok(build_configuration(&gamma, &soup)?)
}

fn box_polygon(spec: &DomainSpec) -> Vec<Point> {
    match spec {
        DomainSpec::Box { size } => {
            let (w, h) = (size[0] as f64 / 2.0, size[1] as f64 / 2.0);
            vec![Point::new(-w, -h), Point::new(w, -h), Point::new(w, h), Point::new(-w, h)]
        }
        DomainSpec::Polygon { .. } => spec.polygon().expect("polygon"),
    }
}

fn soup_command(a: &SoupArgs, seed: u64) -> CliResult<SoupJson> {
    let spec = DomainSpec::parse(&a.domain.domain)?;
    let mut rng = stream(seed, 0);
    if a.continuum {
        let s = BrownianSoupSampler::new(&box_polygon(&spec), a.tmin, a.bridge_step)?;
        let soup = s.sample(&mut rng);
        if a.mass.is_some() {
            return Err(CliError::Invalid("--mass applies to lattice soups".into()));
        }
        return Ok(soup_to_json(&soup));
    }
    if a.max_len < 2 || a.max_len % 2 != 0 {
        return Err(CliError::Invalid("--max-len must be an even number of at least 2".into()));
    }
    let n = a.domain.mesh;
    let dom = spec.build(n)?;
    let mut soup = SoupSampler::new(a.sampler, &dom, a.max_len)?.sample(&mut rng);
    if let Some(m) = a.mass {
        soup = thin_massive(&soup, m, &mut rng)?;
    }
    if n != 1.0 {
        soup = soup.scaled(1.0 / n, 2.0 * n * n)?;
    }
    Ok(soup_to_json(&soup))
}

#[derive(Serialize)]
struct WalkOutput {
    #[serde(flatten)]
    path: PathJson,
    /// Lattice coordinates of the first vertex outside the domain.
    exit: [i32; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    attempts: Option<u64>,
}

fn walk_command(a: &WalkArgs, seed: u64, erased: bool) -> CliResult<WalkOutput> {
    let spec = DomainSpec::parse(&a.domain.domain)?;
    let n = a.domain.mesh;
    let dom = spec.build(n)?;
    let mut rng = stream(seed, 0);
    let (vs, attempts) = match (a.mass, erased) {
        (None, true) => (sample_lerw(&dom, &mut rng)?, None),
        (None, false) => (sample_srw(&dom, &mut rng)?, None),
        (Some(m), true) => {
            let s = sample_killed_lerw(&dom, m, DEFAULT_REJECTION_BUDGET, &mut rng)?;
            (s.vertices, Some(s.attempts))
        }
        (Some(m), false) => {
            let s = sample_killed_conditioned(&dom, m, DEFAULT_REJECTION_BUDGET, &mut rng)?;
            (s.vertices, Some(s.attempts))
        }
    };
    let exit = *vs.last().expect("non-empty walk");
    let path: TimedPath = match (n == 1.0, erased) {
        (true, _) => TimedPath::lattice(vs, 1.0, 1.0)?,
        (false, true) => scale_lerw(vs, n, a.c_star)?,
        (false, false) => scale_walk(vs, n)?,
    };
    Ok(WalkOutput { path: path_to_json(&path), exit: [exit.x, exit.y], attempts })
}

fn load_params<T: serde::de::DeserializeOwned + Default>(p: &Option<PathBuf>) -> CliResult<T> {
    match p {
        Some(p) => read_json(p),
        None => Ok(T::default()),
    }
}

fn unused(a: &VerifyArgs, allowed: &[&str]) -> CliResult<()> {
    let given = [
        ("--replicates", a.replicates.is_some()),
        ("--prefix-len", a.prefix_len.is_some()),
        ("--threshold-p", a.threshold_p.is_some()),
        ("--max-len", a.max_len.is_some()),
        ("--domain", a.domain.is_some()),
        ("--mesh", a.mesh.is_some()),
        ("--meshes", a.meshes.is_some()),
        ("--k", a.k.is_some()),
        ("--sampler", a.sampler.is_some()),
    ];
    for (flag, set) in given {
        if set && !allowed.contains(&flag) {
            return Err(CliError::Usage(format!("{flag} does not apply to this experiment")));
        }
    }
    Ok(())
}

fn integer_mesh(m: f64) -> CliResult<usize> {
    if m >= 1.0 && m.fract() == 0.0 && m <= 1e6 {
        Ok(m as usize)
    } else {
        Err(CliError::Invalid(format!("mesh {m} must be a positive integer here")))
    }
}

pub fn verify_command(a: &VerifyArgs, seed: u64, runner: &Runner) -> CliResult<ExperimentReport> {
    match a.experiment {
        Experiment::Srw => {
            unused(
                a,
                &["--replicates", "--prefix-len", "--threshold-p", "--max-len", "--domain", "--mesh", "--sampler"],
            )?;
            let mut p: srw::SrwParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = a.prefix_len {
                p.prefix_len = v;
            }
            if let Some(v) = a.threshold_p {
                p.threshold_p = v;
            }
            if let Some(v) = a.max_len {
                p.max_len = Some(v);
            }
            if let Some(v) = &a.domain {
                p.domain = DomainSpec::parse(v)?;
            }
            if let Some(v) = a.mesh {
                p.mesh = v;
            }
            if let Some(v) = a.sampler {
                p.sampler = v;
            }
            srw::run(&p, seed, runner)
        }
        Experiment::Intensity => {
            unused(a, &["--replicates", "--k"])?;
            let mut p: intensity::IntensityParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = &a.k {
                p.k = v.clone();
            }
            intensity::run(&p, seed, runner)
        }
        Experiment::Tail => {
            unused(a, &["--replicates", "--k"])?;
            let mut p: tail::TailParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = &a.k {
                match v.as_slice() {
                    [k] => p.k = *k,
                    _ => return Err(CliError::Usage("the tail experiment takes a single --k".into())),
                }
            }
            tail::run(&p, seed, runner)
        }
        Experiment::Smallloop => {
            unused(a, &["--replicates", "--meshes"])?;
            let mut p: smallloop::SmallLoopParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = &a.meshes {
                p.meshes = v.clone();
            }
            smallloop::run(&p, seed, runner)
        }
        Experiment::Neighborhood => {
            unused(a, &["--replicates", "--mesh", "--k"])?;
            let mut p: neighborhood::NeighborhoodParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = a.mesh {
                p.mesh = integer_mesh(v)?;
            }
            if let Some(v) = &a.k {
                p.k = v.clone();
            }
            neighborhood::run(&p, seed, runner)
        }
        Experiment::Scaling => {
            unused(a, &["--replicates", "--threshold-p", "--max-len", "--meshes"])?;
            let mut p: scaling::ScalingParams = load_params(&a.params)?;
            if let Some(v) = a.replicates {
                p.replicates = v;
            }
            if let Some(v) = a.threshold_p {
                p.threshold_p = v;
            }
            if let Some(v) = a.max_len {
                p.max_len = Some(v);
            }
            if let Some(v) = &a.meshes {
                match v.as_slice() {
                    [x, y] => p.meshes = [*x, *y],
                    _ => return Err(CliError::Usage("--meshes takes exactly two values here".into())),
                }
            }
            scaling::run(&p, seed, runner)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DemoSummary {
    pub domain: [usize; 2],
    pub max_len: usize,
    pub gamma_steps: usize,
    pub soup_loops: usize,
    pub hit_loops: usize,
    pub attached_steps: usize,
    pub loop_erasure_recovers_gamma: bool,
    pub duration_discrepancy: f64,
    pub attachment: crate::format::AttachmentJson,
    pub soup_first_loops: Vec<PathJson>,
    pub prefix_test: ExperimentReport,
    pub passed: bool,
}

/// LERW, soup and attachment on a 5x5 box, followed by a small prefix test.
pub fn demo(seed: u64, runner: &Runner) -> CliResult<DemoSummary> {
    let (w, h, k) = (5, 5, 12);
    let dom = loopforge_core::lattice::LatticeDomain::from_box(w, h)?;
    let mut rng = stream(derive_seed(seed, 100), 0);
    let gamma = lattice_gamma(sample_lerw(&dom, &mut rng)?)?;
    let soup = SoupSampler::new(SamplerKind::Exact, &dom, k)?.sample(&mut rng);
    let at = crate::pipeline::attach_uniform(&gamma, &soup, 1.0, &mut rng)?;
    let params = srw::SrwParams { prefix_len: 2, replicates: 4000, ..Default::default() };
    let prefix_test = srw::run(&params, seed, runner)?;
    let erases = at.loop_erasure_recovers_gamma();
    let disc = at.duration_discrepancy();
    Ok(DemoSummary {
        domain: [w, h],
        max_len: k,
        gamma_steps: gamma.path().len() - 1,
        soup_loops: soup.len(),
        hit_loops: at.config.hits().len(),
        attached_steps: at.result.path.len() - 1,
        loop_erasure_recovers_gamma: erases,
        duration_discrepancy: disc,
        attachment: attachment_to_json(&at.result, &at.tie_break),
        soup_first_loops: soup.loops.iter().take(3).map(loop_to_json).collect(),
        passed: prefix_test.passed && erases && disc <= 1e-12,
        prefix_test,
    })
}
