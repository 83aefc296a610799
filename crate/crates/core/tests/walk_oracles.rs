mod common;

use std::collections::HashMap;

use common::{chi2_critical_001, chi2_gof, solve};
use loopforge_core::lattice::{
    loop_erase, sample_killed_conditioned, sample_lerw, sample_srw, LatticeDomain, Vertex, STEPS,
};
use loopforge_core::rng::stream;

/// `(I - P_A)` restricted to the vertices `a` (indices into `dom`).
fn killed_operator(dom: &LatticeDomain, a: &[usize], survive: f64) -> Vec<Vec<f64>> {
    let pos: HashMap<usize, usize> = a.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut m = vec![vec![0.0; a.len()]; a.len()];
    for (r, &i) in a.iter().enumerate() {
        m[r][r] = 1.0;
        for j in dom.neighbours(i) {
            if let Some(&c) = pos.get(&j) {
                m[r][c] -= survive * 0.25;
            }
        }
    }
    m
}

fn green_diag(dom: &LatticeDomain, a: &[usize], x: usize) -> f64 {
    let mut e = vec![0.0; a.len()];
    let k = a.iter().position(|&i| i == x).unwrap();
    e[k] = 1.0;
    solve(killed_operator(dom, a, 1.0), e)[k]
}

/// Law of the loop-erased walk from the product formula
/// `P(gamma) = prod_i G_{A_i}(x_i, x_i) / 4`, `A_i = D minus {x_0..x_{i-1}}`.
fn lerw_law(dom: &LatticeDomain) -> HashMap<Vec<Vertex>, f64> {
    fn go(dom: &LatticeDomain, path: &mut Vec<Vertex>, weight: f64, out: &mut HashMap<Vec<Vertex>, f64>) {
        let x = *path.last().unwrap();
        let xi = dom.index_of(x).unwrap();
        let remaining: Vec<usize> =
            (0..dom.len()).filter(|&i| !path[..path.len() - 1].contains(&dom.vertices()[i])).collect();
        let w = weight * green_diag(dom, &remaining, xi) * 0.25;
        for s in STEPS {
            let y = Vertex::new(x.x + s.x, x.y + s.y);
            if path.contains(&y) {
                continue;
            }
            path.push(y);
            if dom.contains(y) {
                go(dom, path, w, out);
            } else {
                out.insert(path.clone(), w);
            }
            path.pop();
        }
    }
    let mut out = HashMap::new();
    go(dom, &mut vec![Vertex::ORIGIN], 1.0, &mut out);
    out
}

/// Exhaustive enumeration of walks up to `max_len` steps, grouped by loop erasure.
fn truncated_lerw_law(dom: &LatticeDomain, max_len: usize) -> (HashMap<Vec<Vertex>, f64>, f64) {
    fn go(dom: &LatticeDomain, path: &mut Vec<Vertex>, max_len: usize, out: &mut HashMap<Vec<Vertex>, f64>) {
        let x = *path.last().unwrap();
        for s in STEPS {
            let y = Vertex::new(x.x + s.x, x.y + s.y);
            path.push(y);
            if !dom.contains(y) {
                *out.entry(loop_erase(path)).or_insert(0.0) += 0.25f64.powi(path.len() as i32 - 1);
            } else if path.len() <= max_len {
                go(dom, path, max_len, out);
            }
            path.pop();
        }
    }
    let mut out = HashMap::new();
    go(dom, &mut vec![Vertex::ORIGIN], max_len, &mut out);
    let total = out.values().sum();
    (out, total)
}

#[test]
fn single_vertex_domain_forces_one_uniform_step() {
    let dom = LatticeDomain::from_vertices(&[Vertex::ORIGIN], 1.0).unwrap();
    let mut rng = stream(1, 0);
    let mut counts = [0u64; 4];
    for _ in 0..40_000 {
        let w = sample_srw(&dom, &mut rng).unwrap();
        assert_eq!(w.len(), 2);
        counts[Vertex::ORIGIN.direction_to(w[1]).unwrap()] += 1;
        let l = sample_lerw(&dom, &mut rng).unwrap();
        assert_eq!(l.len(), 2);
        let k = sample_killed_conditioned(&dom, 0.5, 1000, &mut rng).unwrap();
        assert_eq!(k.vertices.len(), 2);
    }
    let (stat, dof) = chi2_gof(&counts, &[0.25; 4]);
    assert!(stat < chi2_critical_001(dof));
}

#[test]
fn srw_exit_law_on_three_by_three_box() {
    let dom = LatticeDomain::from_box(3, 3).unwrap();
    let all: Vec<usize> = (0..dom.len()).collect();
    let exits = dom.exterior_boundary();
    let mut probs = Vec::new();
    for z in &exits {
        let b: Vec<f64> = dom
            .vertices()
            .iter()
            .map(|x| 0.25 * STEPS.iter().filter(|s| Vertex::new(x.x + s.x, x.y + s.y) == *z).count() as f64)
            .collect();
        let h = solve(killed_operator(&dom, &all, 1.0), b);
        probs.push(h[dom.index_of(Vertex::ORIGIN).unwrap()]);
    }
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let n = 100_000u64;
    let mut counts = vec![0u64; exits.len()];
    let mut rng = stream(2, 0);
    for _ in 0..n {
        let w = sample_srw(&dom, &mut rng).unwrap();
        counts[exits.iter().position(|z| z == w.last().unwrap()).unwrap()] += 1;
    }
    for (c, p) in counts.iter().zip(&probs) {
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let f = *c as f64 / n as f64;
        assert!((f - p).abs() <= 3.0 * se.max(1e-12), "{f} vs {p}");
    }
}

#[test]
fn squared_displacement_grows_linearly() {
    let dom = LatticeDomain::from_box(61, 61).unwrap();
    let (n, k) = (20_000, 50);
    let mut rng = stream(3, 0);
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let w = sample_srw(&dom, &mut rng).unwrap();
        assert!(w.len() > k);
        vals.push(w[k].dist_sq(Vertex::ORIGIN) as f64);
    }
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - k as f64).abs() <= 3.0 * (var / n as f64).sqrt(), "mean {mean}");
}

#[test]
fn lerw_law_product_formula_agrees_with_truncated_enumeration() {
    let dom = LatticeDomain::from_box(3, 3).unwrap();
    let law = lerw_law(&dom);
    assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
    let (trunc, total) = truncated_lerw_law(&dom, 12);
    let missing = 1.0 - total;
    assert!(missing > 0.0 && missing < 0.2);
    for (path, &p) in &law {
        let q = trunc.get(path).copied().unwrap_or(0.0);
        assert!(q <= p + 1e-12 && p <= q + missing + 1e-12, "{path:?}: {q} vs {p}");
    }
    assert!(trunc.keys().all(|k| law.contains_key(k)));
}

#[test]
fn lerw_sampler_matches_its_law() {
    let dom = LatticeDomain::from_box(3, 3).unwrap();
    let law: Vec<(Vec<Vertex>, f64)> = lerw_law(&dom).into_iter().collect();
    let index: HashMap<Vec<Vertex>, usize> = law.iter().enumerate().map(|(i, (p, _))| (p.clone(), i)).collect();
    let mut counts = vec![0u64; law.len()];
    let mut rng = stream(4, 0);
    for _ in 0..200_000 {
        counts[index[&sample_lerw(&dom, &mut rng).unwrap()]] += 1;
    }
    let probs: Vec<f64> = law.iter().map(|(_, p)| *p).collect();
    let (stat, dof) = chi2_gof(&counts, &probs);
    assert!(stat < chi2_critical_001(dof), "chi2 {stat} on {dof}");
}

#[test]
fn killed_walk_acceptance_matches_survival_probability() {
    let dom = LatticeDomain::from_box(5, 5).unwrap();
    let q: f64 = 0.01;
    let mass = (2.0 * q).sqrt();
    let all: Vec<usize> = (0..dom.len()).collect();
    let b: Vec<f64> = dom
        .vertices()
        .iter()
        .map(|x| {
            (1.0 - q) * 0.25 * STEPS.iter().filter(|s| !dom.contains(Vertex::new(x.x + s.x, x.y + s.y))).count() as f64
        })
        .collect();
    let s = solve(killed_operator(&dom, &all, 1.0 - q), b)[dom.index_of(Vertex::ORIGIN).unwrap()];
    let n = 50_000u64;
    let mut rng = stream(5, 0);
    let mut attempts = 0u64;
    for _ in 0..n {
        let k = sample_killed_conditioned(&dom, mass, 1_000_000, &mut rng).unwrap();
        assert!(!dom.contains(*k.vertices.last().unwrap()));
        attempts += k.attempts;
    }
    let mean = attempts as f64 / n as f64;
    let se = ((1.0 - s) / (s * s) / n as f64).sqrt();
    assert!((mean - 1.0 / s).abs() <= 3.0 * se, "mean attempts {mean} vs {}", 1.0 / s);
    let z = sample_killed_conditioned(&dom, 0.0, 1, &mut rng).unwrap();
    assert_eq!(z.attempts, 1);
}

#[test]
fn lerw_is_the_loop_erasure_of_the_walk() {
    let dom = LatticeDomain::from_box(7, 5).unwrap();
    for seed in 0..200 {
        let w = sample_srw(&dom, &mut stream(seed, 0)).unwrap();
        let l = sample_lerw(&dom, &mut stream(seed, 0)).unwrap();
        assert_eq!(loop_erase(&w), l);
    }
}
