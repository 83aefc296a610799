//! Chronological attachment of hit loops to a simple path.

mod identities;
mod tiebreak;
mod xi;

pub use identities::{
    check_lattice_scaling, check_space_scaling, check_speed_scaling, check_time_scaling, transfer_tie_break,
    IdentityCheck,
};
pub use tiebreak::{enumerate_tie_breaks, TieBreak, TieBreakIter, TieBreakSet};
pub use xi::{
    attach, density_gap, gamma_sigma_path, reach_time, sigma_of, AttachOptions, AttachmentResult, Jump, ReachEntry,
    SigmaPath,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::lattice::Vertex;
    use crate::path::{Loop, SimplePath, TimedPath};
    use crate::soup::{build_configuration, Configuration, LoopSoup};
    use alloc::vec;
    use alloc::vec::Vec;
    use num_bigint::BigUint;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    fn gamma(vs: &[(i32, i32)]) -> SimplePath {
        SimplePath::new(TimedPath::lattice(vs.iter().map(|&(x, y)| v(x, y)).collect(), 1.0, 1.0).unwrap()).unwrap()
    }

    fn lattice_loop(vs: &[(i32, i32)]) -> Loop {
        Loop::lattice(vs.iter().map(|&(x, y)| v(x, y)).collect(), 1.0, 1.0).unwrap()
    }

    fn straight_single() -> Configuration {
        let g = gamma(&[(0, 0), (1, 0), (2, 0)]);
        let l = lattice_loop(&[(1, 0), (1, 1), (2, 1), (2, 0), (1, 0)]);
        build_configuration(&g, &LoopSoup::new(vec![l])).unwrap()
    }

    #[test]
    fn straight_single_loop_fixture() {
        let cfg = straight_single();
        assert_eq!(cfg.hits()[0].sigma, 1.0);
        assert_eq!(cfg.hits()[0].roots, vec![0.0]);
        let b = TieBreak::default_for(&cfg);
        let x = attach(&cfg, 1.0, &b, AttachOptions::default()).unwrap();
        assert_eq!(x.total_time, 6.0);
        assert_eq!(x.path.duration(), 6.0);
        assert!(x.path.is_lattice());
        assert_eq!(x.path.evaluate(3.0).unwrap(), Point::new(2.0, 1.0));
        assert_eq!(x.path.evaluate(6.0).unwrap(), Point::new(2.0, 0.0));
        assert_eq!(x.path.evaluate(0.0).unwrap(), Point::ORIGIN);
        assert_eq!(reach_time(&cfg, 1.0, &b, 0), 1.0);
        assert_eq!(x.reach[0].start, 1.0);
        assert_eq!(x.reach[0].end, 5.0);
        for (t, s) in [(0.5, 0.5), (3.0, 1.0), (5.5, 1.5), (0.0, 0.0), (6.0, 2.0)] {
            assert_eq!(sigma_of(&cfg, 1.0, &b, t), s, "t = {t}");
            assert_eq!(x.sigma.eval(t), s, "t = {t}");
        }
        assert_eq!(x.path.loop_erase().unwrap(), vec![v(0, 0), v(1, 0), v(2, 0)]);
    }

    #[test]
    fn root_not_at_first_vertex_is_used_for_rerooting() {
        let g = gamma(&[(0, 0), (1, 0), (2, 0)]);
        let l = lattice_loop(&[(2, 0), (2, 1), (1, 1), (1, 0), (2, 0)]);
        let cfg = build_configuration(&g, &LoopSoup::new(vec![l])).unwrap();
        assert_eq!(cfg.hits()[0].roots, vec![3.0]);
        let x = attach(&cfg, 1.0, &TieBreak::default_for(&cfg), AttachOptions::default()).unwrap();
        let want = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (1, 0), (2, 0)];
        assert_eq!(x.path.vertices().unwrap(), want.map(|(a, b)| v(a, b)).as_slice());
    }

    #[test]
    fn empty_hits_slow_down_gamma() {
        let g = gamma(&[(0, 0), (1, 0), (2, 0)]);
        let cfg = build_configuration(&g, &LoopSoup::new(vec![])).unwrap();
        let x = attach(&cfg, 0.5, &TieBreak::default_for(&cfg), AttachOptions::default()).unwrap();
        assert_eq!(x.total_time, 1.0);
        assert_eq!(x.path.evaluate(0.25).unwrap(), Point::new(0.5, 0.0));
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(x.sigma.eval(t), 2.0 * t);
        }
    }

    #[test]
    fn reach_time_of_second_loop() {
        let g = gamma(&[(0, 0), (1, 0), (2, 0), (3, 0)]);
        let loops = vec![
            lattice_loop(&[(1, 0), (1, 1), (0, 1), (1, 1), (1, 0)]),
            lattice_loop(&[(2, 0), (2, -1), (3, -1), (2, -1), (2, 0)]),
        ];
        let cfg = build_configuration(&g, &LoopSoup::new(loops)).unwrap();
        let b = TieBreak::default_for(&cfg);
        assert_eq!(reach_time(&cfg, 1.0, &b, 1), 6.0);
        assert_eq!(reach_time(&cfg, 0.0, &b, 0), 0.0);
    }

    #[test]
    fn tie_break_counts() {
        let g = gamma(&[(0, 0), (1, 0), (2, 0)]);
        let single = build_configuration(&g, &LoopSoup::new(vec![lattice_loop(&[(1, 0), (1, 1), (1, 0)])])).unwrap();
        assert_eq!(enumerate_tie_breaks(&single).count(), BigUint::from(1u32));
        let two = build_configuration(
            &g,
            &LoopSoup::new(vec![lattice_loop(&[(1, 0), (1, 1), (1, 0)]), lattice_loop(&[(1, 0), (1, -1), (1, 0)])]),
        )
        .unwrap();
        assert_eq!(enumerate_tie_breaks(&two).count(), BigUint::from(2u32));
        // a loop visiting (1,0) three times
        let three = build_configuration(
            &g,
            &LoopSoup::new(vec![lattice_loop(&[(1, 0), (1, 1), (1, 0), (1, -1), (1, 0), (1, 1), (1, 0)])]),
        )
        .unwrap();
        let set = enumerate_tie_breaks(&three);
        assert_eq!(set.count(), BigUint::from(3u32));
        let all: Vec<TieBreak> = set.iter().collect();
        assert_eq!(all.len(), 3);
        for b in &all {
            b.validate(&three).unwrap();
        }
    }

    #[test]
    fn every_enumerated_tie_break_is_distinct_and_valid() {
        let g = gamma(&[(0, 0), (1, 0), (2, 0)]);
        let loops = vec![
            lattice_loop(&[(1, 0), (1, 1), (1, 0)]),
            lattice_loop(&[(1, 0), (1, -1), (1, 0), (1, 1), (1, 0)]),
            lattice_loop(&[(1, 1), (1, 0), (1, 1)]),
            lattice_loop(&[(0, 0), (0, 1), (0, 0)]),
        ];
        let cfg = build_configuration(&g, &LoopSoup::new(loops)).unwrap();
        let set = enumerate_tie_breaks(&cfg);
        // class {0, 1, 2} at sigma 1 gives 3!, loop 1 has two roots
        assert_eq!(set.count(), BigUint::from(12u32));
        let mut all: Vec<TieBreak> = set.iter().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 12);
        for b in &all {
            b.validate(&cfg).unwrap();
            let x = attach(&cfg, 1.0, b, AttachOptions::default()).unwrap();
            assert_eq!(x.path.loop_erase().unwrap(), cfg.gamma().vertices().unwrap());
        }
    }

    #[test]
    fn invalid_tie_breaks_are_rejected() {
        let cfg = straight_single();
        let bad = TieBreak { order: vec![0], roots: vec![1] };
        assert!(bad.validate(&cfg).is_err());
        let bad = TieBreak { order: vec![], roots: vec![] };
        assert!(attach(&cfg, 1.0, &bad, AttachOptions::default()).is_err());
    }

    #[test]
    fn zero_speed_needs_dense_hits_or_explicit_jumps() {
        let cfg = straight_single();
        let b = TieBreak::default_for(&cfg);
        assert!(matches!(
            attach(&cfg, 0.0, &b, AttachOptions::default()),
            Err(crate::Error::ZeroSpeedRegime { gap }) if gap == 1.0
        ));
        let x = attach(&cfg, 0.0, &b, AttachOptions { allow_jumps: true, ..Default::default() }).unwrap();
        assert_eq!(x.total_time, 4.0);
        assert_eq!(x.jumps.len(), 2);
        assert_eq!(x.path.evaluate(2.0).unwrap(), Point::new(2.0, 1.0));
        assert_eq!(x.path.end(), Point::new(2.0, 0.0));
    }

    #[test]
    fn gamma_sigma_path_follows_gamma_between_loops() {
        let cfg = straight_single();
        let x = attach(&cfg, 1.0, &TieBreak::default_for(&cfg), AttachOptions::default()).unwrap();
        let gs = gamma_sigma_path(&cfg, &x).unwrap();
        assert_eq!(gs.duration(), 6.0);
        for (t, p) in [(0.5, (0.5, 0.0)), (3.0, (1.0, 0.0)), (5.5, (1.5, 0.0))] {
            assert_eq!(gs.evaluate(t).unwrap(), Point::new(p.0, p.1));
        }
    }

    #[test]
    fn trivial_scalings_are_exact() {
        let cfg = straight_single();
        let b = TieBreak::default_for(&cfg);
        assert_eq!(check_space_scaling(&cfg, 1.0, &b, 1.0).unwrap().discrepancy, 0.0);
        assert_eq!(check_time_scaling(&cfg, 1.0, &b, 1.0).unwrap().discrepancy, 0.0);
        assert_eq!(check_speed_scaling(&cfg, 1.0, &b, 1.0).unwrap().discrepancy, 0.0);
        assert!(check_space_scaling(&cfg, 0.7, &b, 2.0).unwrap().discrepancy <= 1e-9);
        assert!(check_lattice_scaling(&cfg, &b, 3.0, 1.0).unwrap().discrepancy <= 1e-9);
    }
}
