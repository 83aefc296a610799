mod common;

use common::{random_lattice_config, random_loop, random_soup};
use loopforge_core::lattice::LatticeDomain;
use loopforge_core::metrics::{brute_force_soup_distance, config_distance, is_suited, regularity_check, soup_distance};
use loopforge_core::rng::stream;
use loopforge_core::soup::{build_configuration, ThinningLoopSampler};
use loopforge_core::{Loop, SimplePath};
use proptest::prelude::*;

fn lattice_soup(seed: u64, max: usize) -> Vec<Loop> {
    let dom = LatticeDomain::from_box(3, 3).unwrap();
    let s = ThinningLoopSampler::new(&dom, 6);
    let mut rng = stream(seed, 4);
    let mut out: Vec<Loop> = Vec::new();
    while out.len() < max {
        out.extend(s.sample(&mut rng).loops);
    }
    out.truncate(max);
    out
}

proptest! {
    #[test]
    fn soup_distance_equals_exhaustive_oracle(seed in any::<u64>()) {
        let mut rng = stream(seed, 0);
        let a = random_soup(&mut rng, 5);
        let b = random_soup(&mut rng, 5);
        let r = soup_distance(&a, &b);
        prop_assert_eq!(r.distance, brute_force_soup_distance(&a, &b));
        prop_assert!(r.witness.is_valid_for(&a, &b));
    }

    #[test]
    fn soup_distance_oracle_on_lattice_soups_with_ties(seed in any::<u64>(), na in 0usize..=5, nb in 0usize..=5) {
        let a = lattice_soup(seed, na);
        let b = lattice_soup(seed ^ 0x5555, nb);
        let r = soup_distance(&a, &b);
        prop_assert_eq!(r.distance, brute_force_soup_distance(&a, &b));
        prop_assert!(r.witness.is_valid_for(&a, &b));
    }

    #[test]
    fn soup_distance_is_a_pseudometric(seed in any::<u64>()) {
        let mut rng = stream(seed, 1);
        let a = random_soup(&mut rng, 4);
        let b = random_soup(&mut rng, 4);
        let c = random_soup(&mut rng, 4);
        prop_assert_eq!(soup_distance(&a, &a).distance, 0.0);
        let ab = soup_distance(&a, &b).distance;
        prop_assert_eq!(ab, soup_distance(&b, &a).distance);
        let bc = soup_distance(&b, &c).distance;
        prop_assert!(soup_distance(&a, &c).distance <= ab + bc);
    }

    #[test]
    fn shared_loops_never_increase_the_distance(seed in any::<u64>()) {
        let mut rng = stream(seed, 2);
        let mut a = random_soup(&mut rng, 4);
        let mut b = random_soup(&mut rng, 4);
        let before = soup_distance(&a, &b).distance;
        let l = random_loop(&mut rng, 3);
        a.push(l.clone());
        b.insert(0, l);
        prop_assert!(soup_distance(&a, &b).distance <= before);
    }

    #[test]
    fn config_distance_triangle_within_rho_slack(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (x, y, z) = (random_lattice_config(s1), random_lattice_config(s2), random_lattice_config(s3));
        let xy = config_distance(&x, &y, 64);
        let yz = config_distance(&y, &z, 64);
        let xz = config_distance(&x, &z, 64);
        prop_assert!(xz.d <= xy.d + yz.d);
        let slack = xz.rho_error_bound;
        prop_assert!(xz.rho <= xy.rho + yz.rho + slack + 1e-12);
        prop_assert_eq!(xy.d, config_distance(&y, &x, 64).d);
        prop_assert!(config_distance(&x, &x, 64).d_r0 == 0.0);
    }

    #[test]
    fn identity_witness_is_strongly_suited(seed in any::<u64>(), eps in 0.5f64..8.0) {
        let cfg = random_lattice_config(seed);
        let w = soup_distance(&cfg.soup().loops, &cfg.soup().loops).witness;
        let s = is_suited(&w, &cfg, &cfg, eps.max(w.delta));
        prop_assert!(s.suited && s.strongly_suited);
    }

    #[test]
    fn regularity_report_is_deterministic(seed in any::<u64>()) {
        let cfg = random_lattice_config(seed);
        prop_assert_eq!(regularity_check(&cfg), regularity_check(&cfg.clone()));
        let r = regularity_check(&cfg);
        for w in r.density_gap.windows(2) {
            prop_assert!(w[0].0 > w[1].0 && w[0].1 >= w[1].1);
        }
    }
}

#[test]
fn removing_a_non_intersecting_loop_keeps_the_configuration() {
    let gamma = SimplePath::new(common::lattice_path(&[(0, 0), (1, 0), (2, 0)])).unwrap();
    let hit = common::lattice_loop(&[(1, 0), (1, 1), (1, 0)]);
    let miss = common::lattice_loop(&[(5, 5), (5, 6), (5, 5)]);
    let with = build_configuration(&gamma, &loopforge_core::soup::LoopSoup::new(vec![hit.clone(), miss])).unwrap();
    let without = build_configuration(&gamma, &loopforge_core::soup::LoopSoup::new(vec![hit])).unwrap();
    assert_eq!(with.hits().len(), 1);
    assert_eq!(with.hits()[0].sigma, without.hits()[0].sigma);
    assert_eq!(with.total_time(), without.total_time());
}
