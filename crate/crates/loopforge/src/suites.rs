//! Deterministic check suites over randomly generated instances: scaling
//! identities, modulus bounds, soup and configuration distances, and loop
//! erasure of attachments on several domains.

use loopforge_core::attach::{
    attach, check_lattice_scaling, check_space_scaling, check_speed_scaling, check_time_scaling, density_gap,
    gamma_sigma_path, AttachOptions, TieBreak,
};
use loopforge_core::lattice::{sample_lerw, LatticeDomain};
use loopforge_core::metrics::{brute_force_soup_distance, config_distance, soup_distance};
use loopforge_core::rng::{derive_seed, stream, SimRng};
use loopforge_core::soup::{build_configuration, Configuration, ThinningLoopSampler};
use loopforge_core::{Loop, Point, TimedPath};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::pipeline::{lattice_gamma, lerw_attach, SamplerKind, SoupSampler};
use crate::runner::Runner;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    /// Largest observed value of the suite's discrepancy measure.
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn from_values(name: &str, values: &[f64], tolerance: f64) -> Self {
        SuiteOutcome {
            name: name.into(),
            cases: values.len() as u64,
            failures: values.iter().filter(|v| !(**v <= tolerance)).count() as u64,
            worst: values.iter().copied().fold(0.0, f64::max),
            tolerance,
        }
    }
}

/// A configuration on a random box of side 2..=8 whose soup is the union of
/// 1..=8 independent draws at cut-off 4..=16.
pub fn random_lattice_config(seed: u64) -> CliResult<Configuration> {
    let mut rng = stream(seed, 1);
    let w = rng.random_range(2..=8);
    let h = rng.random_range(2..=8);
    let k = 2 * rng.random_range(2..=8);
    let layers = rng.random_range(1..=8);
    let dom = LatticeDomain::from_box(w, h)?;
    let mut rng = stream(seed, 0);
    let gamma = lattice_gamma(sample_lerw(&dom, &mut rng)?)?;
    let sampler = ThinningLoopSampler::new(&dom, k);
    let mut soup = sampler.sample(&mut rng);
    for _ in 1..layers {
        soup.loops.extend(sampler.sample(&mut rng).loops);
    }
    Ok(build_configuration(&gamma, &soup)?)
}

fn uniform_tie_break(cfg: &Configuration, seed: u64) -> TieBreak {
    loopforge_core::attach::enumerate_tie_breaks(cfg).sample_uniform(&mut stream(seed, 9))
}

/// The space, time, speed and lattice scaling identities on `instances`
/// random configurations each; tolerance `1e-9` in the uniform distance.
pub fn identity_suite(master: u64, instances: u64, runner: &Runner) -> CliResult<Vec<SuiteOutcome>> {
    let rows = runner.try_map(instances, |i| {
        let seed = derive_seed(master, i);
        let cfg = random_lattice_config(seed)?;
        let b = uniform_tie_break(&cfg, seed);
        let mut rng = stream(seed, 2);
        let lambda = rng.random_range(0.05..2.0);
        let a = rng.random_range(0.1..5.0);
        let c = rng.random_range(0.1..5.0);
        let n = rng.random_range(1..40) as f64;
        let c_star = rng.random_range(0.2..3.0);
        Ok([
            check_space_scaling(&cfg, lambda, &b, a)?.discrepancy,
            check_time_scaling(&cfg, lambda, &b, c)?.discrepancy,
            check_speed_scaling(&cfg, lambda, &b, c)?.discrepancy,
            check_lattice_scaling(&cfg, &b, n, c_star)?.discrepancy,
        ])
    })?;
    let names = ["space scaling", "time scaling", "speed scaling", "lattice scaling"];
    Ok(names
        .iter()
        .enumerate()
        .map(|(j, name)| SuiteOutcome::from_values(name, &rows.iter().map(|r| r[j]).collect::<Vec<_>>(), 1e-9))
        .collect())
}

/// Geometric grid of `n` scales from 2 down by factors of two.
pub fn scale_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0f64.powi(1 - j as i32)).collect()
}

/// `omega_delta(sigma) <= omega^1_delta(X)` and
/// `omega_eps(X) <= 2 omega_eps(L) + omega_eps(gamma o sigma)` over a
/// 16-point grid. Values are the largest excess of each left side over its
/// bound.
pub fn modulus_suite(master: u64, configs: u64, runner: &Runner) -> CliResult<Vec<SuiteOutcome>> {
    let grid = scale_grid(16);
    let rows = runner.try_map(configs, |i| {
        let seed = derive_seed(master, i);
        let cfg = random_lattice_config(seed)?;
        let b = uniform_tie_break(&cfg, seed);
        let lambda = stream(seed, 3).random_range(0.05..2.0);
        let x = attach(&cfg, lambda, &b, AttachOptions::default())?;
        let gs = gamma_sigma_path(&cfg, &x)?;
        let mut sigma: f64 = f64::NEG_INFINITY;
        let mut path: f64 = f64::NEG_INFINITY;
        for &d in &grid {
            sigma = sigma.max(x.sigma.modulus(d) - density_gap(&cfg, d));
            let wl = cfg.soup().loops.iter().map(|l| l.periodic_modulus(d)).fold(0.0, f64::max);
            path = path.max(x.path.modulus(d) - (2.0 * wl + gs.modulus(d)));
        }
        Ok([sigma.max(0.0), path.max(0.0)])
    })?;
    let tol = 1e-9;
    let mut out = Vec::new();
    for (j, name) in ["sigma modulus", "attachment modulus"].iter().enumerate() {
        let mut s = SuiteOutcome::from_values(name, &rows.iter().map(|r| r[j]).collect::<Vec<_>>(), tol);
        s.cases *= grid.len() as u64;
        out.push(s);
    }
    Ok(out)
}

fn random_continuum_loop(rng: &mut SimRng) -> Loop {
    let n = rng.random_range(1..=3);
    let mut t = 0.0;
    let mut p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let first = p;
    let mut s = vec![(0.0, p)];
    for _ in 0..n {
        t += rng.random_range(0.05..1.0);
        p = p + Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        s.push((t, p));
    }
    s.push((t + rng.random_range(0.05..1.0), first));
    Loop::new(TimedPath::continuum(s).expect("increasing times")).expect("closed")
}

fn random_soup(rng: &mut SimRng, max: usize) -> Vec<Loop> {
    (0..rng.random_range(0..=max)).map(|_| random_continuum_loop(rng)).collect()
}

/// Lattice loops of a small box: many equal durations and distances.
fn lattice_soup(rng: &mut SimRng, max: usize) -> Vec<Loop> {
    let dom = LatticeDomain::from_box(3, 3).expect("box");
    let s = ThinningLoopSampler::new(&dom, 6);
    let want = rng.random_range(0..=max);
    let mut out: Vec<Loop> = Vec::new();
    while out.len() < want {
        out.extend(s.sample(rng).loops);
    }
    out.truncate(want);
    out
}

/// The soup distance against exhaustive search over partial bijections on
/// `pairs` random pairs of at most five loops, and the pseudometric axioms of
/// the soup and configuration distances on `triples` random triples.
pub fn distance_suite(master: u64, pairs: u64, triples: u64, runner: &Runner) -> CliResult<Vec<SuiteOutcome>> {
    let oracle = runner.map(pairs, |i| {
        let mut rng = stream(derive_seed(master, 0), i);
        let (a, b) = if i % 2 == 0 {
            (random_soup(&mut rng, 5), random_soup(&mut rng, 5))
        } else {
            (lattice_soup(&mut rng, 5), lattice_soup(&mut rng, 5))
        };
        let r = soup_distance(&a, &b);
        let bad = r.distance != brute_force_soup_distance(&a, &b) || !r.witness.is_valid_for(&a, &b);
        f64::from(u8::from(bad))
    });
    let axioms = runner.try_map(triples, |i| {
        let mut rng = stream(derive_seed(master, 1), i);
        let (a, b, c) = (random_soup(&mut rng, 4), random_soup(&mut rng, 4), random_soup(&mut rng, 4));
        let ab = soup_distance(&a, &b).distance;
        let bc = soup_distance(&b, &c).distance;
        let ac = soup_distance(&a, &c).distance;
        let soup_excess =
            [soup_distance(&a, &a).distance, (ab - soup_distance(&b, &a).distance).abs(), (ac - ab - bc).max(0.0)]
                .into_iter()
                .fold(0.0, f64::max);
        let seeds = [0, 1, 2].map(|j| derive_seed(derive_seed(master, 2), 3 * i + j));
        let x = random_lattice_config(seeds[0])?;
        let y = random_lattice_config(seeds[1])?;
        let z = random_lattice_config(seeds[2])?;
        let (xy, yx) = (config_distance(&x, &y, 64), config_distance(&y, &x, 64));
        let (yz, xz) = (config_distance(&y, &z, 64), config_distance(&x, &z, 64));
        let symmetry = [xy.rho - yx.rho, xy.d - yx.d, xy.dt - yx.dt, xy.domega - yx.domega]
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max);
        let exact_triangle = [
            xz.d - xy.d - yz.d,
            xz.dt - xy.dt - yz.dt,
            xz.domega - xy.domega - yz.domega,
            config_distance(&x, &x, 64).d_r0,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        // the true rho(x, z) lies within rho_error_bound of its estimate
        let rho_excess = (xz.rho - xy.rho - yz.rho - xz.rho_error_bound).max(0.0);
        Ok([soup_excess, symmetry, exact_triangle, rho_excess])
    })?;
    let mut out = vec![SuiteOutcome::from_values("soup distance oracle", &oracle, 0.0)];
    let names = ["soup pseudometric", "configuration symmetry", "configuration triangle", "rho triangle"];
    for (j, name) in names.iter().enumerate() {
        let tol = if j == 3 { 1e-12 } else { 0.0 };
        out.push(SuiteOutcome::from_values(name, &axioms.iter().map(|r| r[j]).collect::<Vec<_>>(), tol));
    }
    Ok(out)
}

/// A domain of the loop-erasure suite.
#[derive(Debug, Clone)]
pub struct ErasureCase {
    pub label: String,
    pub domain: LatticeDomain,
    pub sampler: SamplerKind,
    pub max_len: usize,
    pub replicates: u64,
}

/// Default domains: boxes, a non-square rectangle and an L-shaped region, under
/// both soup samplers.
pub fn erasure_cases(replicates_per_case: u64) -> CliResult<Vec<ErasureCase>> {
    let l_shape: Vec<_> = (-3..=3)
        .flat_map(|x| (-3..=3).map(move |y| loopforge_core::lattice::Vertex::new(x, y)))
        .filter(|v| !(v.x > 0 && v.y > 0))
        .collect();
    let case = |label: &str, domain: LatticeDomain, sampler, max_len| ErasureCase {
        label: label.into(),
        domain,
        sampler,
        max_len,
        replicates: replicates_per_case,
    };
    Ok(vec![
        case("5x5 exact", LatticeDomain::from_box(5, 5)?, SamplerKind::Exact, 16),
        case("7x4 exact", LatticeDomain::from_box(7, 4)?, SamplerKind::Exact, 12),
        case("L-shape exact", LatticeDomain::from_vertices(&l_shape, 1.0)?, SamplerKind::Exact, 10),
        case("9x9 thinning", LatticeDomain::from_box(9, 9)?, SamplerKind::Thinning, 40),
        case("15x6 thinning", LatticeDomain::from_box(15, 6)?, SamplerKind::Thinning, 30),
    ])
}

/// Per case: the number of attachments at `lambda = 1` whose loop erasure
/// differs from the path, and the largest duration-identity discrepancy.
pub fn erasure_suite(
    master: u64,
    cases: &[ErasureCase],
    runner: &Runner,
) -> CliResult<Vec<(String, SuiteOutcome, SuiteOutcome)>> {
    let mut out = Vec::new();
    for (ci, c) in cases.iter().enumerate() {
        let sampler = SoupSampler::new(c.sampler, &c.domain, c.max_len)?;
        let rows = runner.try_map(c.replicates, |i| {
            let mut rng = stream(derive_seed(master, ci as u64), i);
            let a = lerw_attach(&c.domain, &sampler, 1.0, &mut rng)?;
            Ok((f64::from(u8::from(!a.loop_erasure_recovers_gamma())), a.duration_discrepancy()))
        })?;
        out.push((
            c.label.clone(),
            SuiteOutcome::from_values("loop erasure", &rows.iter().map(|r| r.0).collect::<Vec<_>>(), 0.0),
            SuiteOutcome::from_values("duration identity", &rows.iter().map(|r| r.1).collect::<Vec<_>>(), 1e-12),
        ));
    }
    Ok(out)
}

/// Duration identity at arbitrary speeds on random configurations.
pub fn duration_suite(master: u64, configs: u64, runner: &Runner) -> CliResult<SuiteOutcome> {
    let rows = runner.try_map(configs, |i| {
        let seed = derive_seed(master, i);
        let cfg = random_lattice_config(seed)?;
        let b = uniform_tie_break(&cfg, seed);
        let lambda = stream(seed, 4).random_range(0.0..3.0);
        let x = attach(&cfg, lambda, &b, AttachOptions { allow_jumps: true, ..Default::default() })?;
        Ok(crate::pipeline::duration_discrepancy(&cfg, &x))
    })?;
    Ok(SuiteOutcome::from_values("duration identity", &rows, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let r = Runner::new(Some(2)).unwrap();
        assert!(identity_suite(1, 10, &r).unwrap().iter().all(SuiteOutcome::passed));
        assert!(modulus_suite(1, 10, &r).unwrap().iter().all(SuiteOutcome::passed));
        assert!(distance_suite(1, 10, 5, &r).unwrap().iter().all(SuiteOutcome::passed));
        assert!(duration_suite(1, 10, &r).unwrap().passed());
        let cases: Vec<ErasureCase> = erasure_cases(20).unwrap();
        for (_, a, b) in erasure_suite(1, &cases, &r).unwrap() {
            assert!(a.passed() && b.passed());
        }
    }
}
