#![allow(dead_code)]

use loopforge_core::attach::{enumerate_tie_breaks, TieBreak};
use loopforge_core::lattice::{sample_lerw, LatticeDomain, Vertex};
use loopforge_core::rng::{stream, SimRng};
use loopforge_core::soup::{build_configuration, Configuration, LoopSoup, ThinningLoopSampler};
use loopforge_core::{Loop, Point, SimplePath, TimedPath};
use rand::Rng;

/// A unit-lattice configuration: a loop-erased walk from the origin of a
/// `w x h` box together with a thinning-sampled soup of loops of length at
/// most `max_len`.
pub fn lattice_config(seed: u64, w: usize, h: usize, max_len: usize) -> Configuration {
    layered_config(seed, w, h, max_len, 1)
}

/// As [`lattice_config`] with the soup replaced by the union of `layers`
/// independent draws, i.e. a soup of intensity `layers`.
pub fn layered_config(seed: u64, w: usize, h: usize, max_len: usize, layers: usize) -> Configuration {
    let dom = LatticeDomain::from_box(w, h).unwrap();
    let mut rng = stream(seed, 0);
    let g = sample_lerw(&dom, &mut rng).unwrap();
    let gamma = SimplePath::new(TimedPath::lattice(g, 1.0, 1.0).unwrap()).unwrap();
    let sampler = ThinningLoopSampler::new(&dom, max_len);
    let mut soup = sampler.sample(&mut rng);
    for _ in 1..layers {
        soup.loops.extend(sampler.sample(&mut rng).loops);
    }
    build_configuration(&gamma, &soup).unwrap()
}

/// A random configuration drawn from a small menu of box sizes.
pub fn random_lattice_config(seed: u64) -> Configuration {
    let mut rng = stream(seed, 1);
    let w = rng.random_range(2..=8);
    let h = rng.random_range(2..=8);
    let k = 2 * rng.random_range(2..=8);
    let layers = rng.random_range(1..=8);
    layered_config(seed, w, h, k, layers)
}

pub fn uniform_tie_break(cfg: &Configuration, rng: &mut SimRng) -> TieBreak {
    enumerate_tie_breaks(cfg).sample_uniform(rng)
}

pub fn v(x: i32, y: i32) -> Vertex {
    Vertex::new(x, y)
}

pub fn lattice_path(vs: &[(i32, i32)]) -> TimedPath {
    TimedPath::lattice(vs.iter().map(|&(x, y)| v(x, y)).collect(), 1.0, 1.0).unwrap()
}

pub fn lattice_loop(vs: &[(i32, i32)]) -> Loop {
    Loop::new(lattice_path(vs)).unwrap()
}

/// A random continuum path with `n` segments and random positive time steps.
pub fn random_path(rng: &mut impl Rng, n: usize) -> TimedPath {
    let mut t = 0.0;
    let mut p = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut s = vec![(0.0, p)];
    for _ in 0..n {
        t += rng.random_range(0.05..1.0);
        p = p + Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        s.push((t, p));
    }
    TimedPath::continuum(s).unwrap()
}

/// A random closed continuum loop.
pub fn random_loop(rng: &mut impl Rng, n: usize) -> Loop {
    let p = random_path(rng, n);
    let mut s: Vec<(f64, Point)> = p.samples().collect();
    let t = s.last().unwrap().0 + rng.random_range(0.05..1.0);
    s.push((t, s[0].1));
    Loop::new(TimedPath::continuum(s).unwrap()).unwrap()
}

pub fn random_soup(rng: &mut impl Rng, max: usize) -> Vec<Loop> {
    (0..rng.random_range(0..=max))
        .map(|_| {
            let n = rng.random_range(1..=3);
            random_loop(rng, n)
        })
        .collect()
}

/// Soup draw from a configuration's own domain, reused by tests that need a
/// second configuration on the same path.
pub fn resample_soup(seed: u64, w: usize, h: usize, max_len: usize) -> LoopSoup {
    let dom = LatticeDomain::from_box(w, h).unwrap();
    ThinningLoopSampler::new(&dom, max_len).sample(&mut stream(seed, 7))
}

/// Geometric grid of `n` scales from 2 down by factors of two.
pub fn delta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0f64.powi(1 - j as i32)).collect()
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Upper 0.001 quantile of the chi-square law (Wilson-Hilferty).
pub fn chi2_critical_001(dof: usize) -> f64 {
    let k = dof as f64;
    let z = 3.090_232_306_167_813;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

/// Goodness-of-fit statistic of observed counts against probabilities,
/// pooling cells whose expected count is below 5 into one cell.
pub fn chi2_gof(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    let n: u64 = observed.iter().sum();
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut po, mut pe) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * n as f64;
        if e < 5.0 {
            po += o as f64;
            pe += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}
