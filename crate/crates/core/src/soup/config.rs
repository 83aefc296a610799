//! The hit structure of a simple path and a loop soup.
//!
//! A loop `l` hits `gamma` when their traces meet. Its first-hit time is
//! `sigma_l = inf { s : gamma(s) in l }`, its hit point `x_l = gamma(sigma_l)`,
//! and its root set `Theta_l` collects the times at which `l` visits `x_l`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::LoopSoup;
use crate::error::{Error, Result};
use crate::geom::{closest_param, segment_intersection, BBox, Point};
use crate::path::{Loop, PathKind, SimplePath, TimedPath};

/// Spatial tolerance for root times of continuum loops.
pub const ROOT_TOL: f64 = 1e-9;

/// Guard band of the segment intersection predicate.
const GUARD: f64 = 1e-12;

/// One loop of the soup that meets the path.
#[derive(Debug, Clone, PartialEq)]
pub struct HitRecord {
    pub loop_index: usize,
    /// First-hit time `sigma_l` on the path's clock.
    pub sigma: f64,
    /// Index of the hit vertex on a lattice path.
    pub gamma_index: Option<usize>,
    /// Hit point `x_l = gamma(sigma_l)`.
    pub point: Point,
    /// Root times `Theta_l`, sorted, in `[0, t_l)`.
    pub roots: Vec<f64>,
    /// Sample indices of the roots of a lattice loop.
    pub root_indices: Option<Vec<usize>>,
    /// Set when geometric decisions fell inside the rounding guard band or
    /// distinct root clusters were found close together.
    pub ambiguous: bool,
}

/// A path together with a soup and the hits between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    gamma: TimedPath,
    soup: LoopSoup,
    hits: Vec<HitRecord>,
}

impl Configuration {
    pub fn gamma(&self) -> &TimedPath {
        &self.gamma
    }

    pub fn soup(&self) -> &LoopSoup {
        &self.soup
    }

    /// Hits sorted by loop index.
    pub fn hits(&self) -> &[HitRecord] {
        &self.hits
    }

    pub fn hit_loop(&self, h: usize) -> &Loop {
        &self.soup.loops[self.hits[h].loop_index]
    }

    pub fn is_lattice(&self) -> bool {
        self.gamma.is_lattice()
    }

    /// `t_{gamma,L} = sum over hit loops of t_l + t_gamma`.
    pub fn total_time(&self) -> f64 {
        self.hits.iter().map(|h| self.soup.loops[h.loop_index].duration()).sum::<f64>() + self.gamma.duration()
    }

    /// Hits grouped by equal first-hit time, classes in order of `sigma`,
    /// members in loop-index order.
    pub fn sigma_classes(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.hits.len()).collect();
        order.sort_by(|&a, &b| self.hits[a].sigma.total_cmp(&self.hits[b].sigma).then(a.cmp(&b)));
        let mut out: Vec<Vec<usize>> = Vec::new();
        for h in order {
            match out.last_mut() {
                Some(c) if self.same_sigma(c[0], h) => c.push(h),
                _ => out.push(alloc::vec![h]),
            }
        }
        out
    }

    fn same_sigma(&self, a: usize, b: usize) -> bool {
        match (self.hits[a].gamma_index, self.hits[b].gamma_index) {
            (Some(i), Some(j)) => i == j,
            _ => self.hits[a].sigma == self.hits[b].sigma,
        }
    }

    /// Position of the hit of loop `loop_index`, if it hits.
    pub fn hit_of_loop(&self, loop_index: usize) -> Option<usize> {
        self.hits.binary_search_by_key(&loop_index, |h| h.loop_index).ok()
    }
}

/// Compute first-hit times, hit points and root sets of every loop of the soup
/// meeting `gamma`.
///
/// Lattice inputs are compared vertex by vertex. Continuum inputs use exact
/// segment intersection with a small guard band; decisions inside the band
/// are flagged on the hit record.
pub fn build_configuration(gamma: &SimplePath, soup: &LoopSoup) -> Result<Configuration> {
    let g = gamma.path();
    let hits = match g.kind() {
        PathKind::Lattice { mesh, .. } => lattice_hits(g, mesh, soup)?,
        PathKind::Continuum => continuum_hits(g, soup)?,
    };
    Ok(Configuration { gamma: g.clone(), soup: soup.clone(), hits })
}

fn lattice_hits(g: &TimedPath, mesh: f64, soup: &LoopSoup) -> Result<Vec<HitRecord>> {
    let gv = g.vertices().unwrap();
    let index: BTreeMap<_, usize> = gv.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut hits = Vec::new();
    for (li, l) in soup.loops.iter().enumerate() {
        let data = l
            .path()
            .lattice_data()
            .ok_or_else(|| Error::Mismatch(format!("loop {li} is a continuum loop but the path is a lattice path")))?;
        if data.mesh != mesh {
            return Err(Error::Mismatch(format!("loop {li} has mesh {} but the path has mesh {mesh}", data.mesh)));
        }
        let body = &data.vertices[..data.vertices.len() - 1];
        let Some(first) = body.iter().filter_map(|v| index.get(v).copied()).min() else {
            continue;
        };
        let x = gv[first];
        let root_indices: Vec<usize> = body.iter().enumerate().filter(|(_, v)| **v == x).map(|(j, _)| j).collect();
        let roots = root_indices.iter().map(|&j| l.path().times()[j]).collect();
        hits.push(HitRecord {
            loop_index: li,
            sigma: g.times()[first],
            gamma_index: Some(first),
            point: g.points()[first],
            roots,
            root_indices: Some(root_indices),
            ambiguous: false,
        });
    }
    Ok(hits)
}

fn continuum_hits(g: &TimedPath, soup: &LoopSoup) -> Result<Vec<HitRecord>> {
    let gt = g.times();
    let gp = g.points();
    let mut hits = Vec::new();
    for (li, l) in soup.loops.iter().enumerate() {
        if l.path().is_lattice() {
            return Err(Error::Mismatch(format!("loop {li} is a lattice loop but the path is a continuum path")));
        }
        let lp = l.path().points();
        let lt = l.path().times();
        let lbox = BBox::of_points(lp).unwrap();
        let mut found: Option<(usize, f64, bool)> = None;
        if gp.len() == 1 && lp.iter().any(|p| p.dist(gp[0]) <= ROOT_TOL) {
            found = Some((0, 0.0, true));
        }
        for i in 0..gp.len().saturating_sub(1) {
            let sbox = BBox::segment(gp[i], gp[i + 1]);
            if !sbox.overlaps(&lbox, GUARD) {
                continue;
            }
            let mut best: Option<(f64, bool)> = None;
            for j in 0..lp.len() - 1 {
                if !sbox.overlaps(&BBox::segment(lp[j], lp[j + 1]), GUARD) {
                    continue;
                }
                if let Some(hit) = segment_intersection(gp[i], gp[i + 1], lp[j], lp[j + 1], GUARD) {
                    let amb = hit.ambiguous;
                    best = Some(match best {
                        Some((u, a)) if u <= hit.u => (u, a || amb && u == hit.u),
                        _ => (hit.u, amb),
                    });
                }
            }
            if let Some((u, amb)) = best {
                found = Some((i, u, amb));
                break;
            }
        }
        let Some((i, u, mut ambiguous)) = found else {
            continue;
        };
        let sigma = if gp.len() == 1 { 0.0 } else { gt[i] + u * (gt[i + 1] - gt[i]) };
        let x = if gp.len() == 1 { gp[0] } else { gp[i].lerp(gp[i + 1], u) };
        let d = l.duration();
        let mut roots: Vec<f64> = Vec::new();
        for j in 0..lp.len() - 1 {
            let v = closest_param(x, lp[j], lp[j + 1]);
            if lp[j].lerp(lp[j + 1], v).dist(x) <= ROOT_TOL {
                let th = lt[j] + v * (lt[j + 1] - lt[j]);
                roots.push(if th >= d { 0.0 } else { th });
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * (1.0 + d));
        if roots.len() > 1 && (roots[0] + d - roots[roots.len() - 1]).abs() <= 1e-12 * (1.0 + d) {
            roots.pop();
        }
        if roots.is_empty() {
            // the intersection point lies within the guard band of the loop
            let (j, v) = (0..lp.len() - 1)
                .map(|j| (j, closest_param(x, lp[j], lp[j + 1])))
                .min_by(|a, b| {
                    let da = lp[a.0].lerp(lp[a.0 + 1], a.1).dist(x);
                    let db = lp[b.0].lerp(lp[b.0 + 1], b.1).dist(x);
                    da.total_cmp(&db)
                })
                .unwrap();
            roots.push(lt[j] + v * (lt[j + 1] - lt[j]));
            ambiguous = true;
        }
        if roots.len() > 1 {
            ambiguous = true;
        }
        hits.push(HitRecord {
            loop_index: li,
            sigma,
            gamma_index: None,
            point: x,
            roots,
            root_indices: None,
            ambiguous,
        });
    }
    Ok(hits)
}

/// `T_{<= delta}`: total duration of hit loops with `t_l <= delta`.
pub fn small_loop_time(config: &Configuration, delta: f64) -> f64 {
    config.hits.iter().map(|h| config.soup.loops[h.loop_index].duration()).filter(|&t| t <= delta).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vertex;
    use alloc::vec;

    fn v(x: i32, y: i32) -> Vertex {
        Vertex::new(x, y)
    }

    fn straight() -> SimplePath {
        SimplePath::new(TimedPath::lattice(vec![v(0, 0), v(1, 0), v(2, 0)], 1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn lattice_first_hit_and_roots() {
        let loops = vec![
            // square through (1,0) and (2,0): first hit is (1,0) at sigma 1
            Loop::lattice(vec![v(2, 0), v(2, 1), v(1, 1), v(1, 0), v(2, 0)], 1.0, 1.0).unwrap(),
            // misses
            Loop::lattice(vec![v(0, 2), v(0, 3), v(0, 2)], 1.0, 1.0).unwrap(),
            // visits the origin twice
            Loop::lattice(vec![v(0, 0), v(0, 1), v(0, 0), v(-1, 0), v(0, 0)], 1.0, 1.0).unwrap(),
        ];
        let cfg = build_configuration(&straight(), &LoopSoup::new(loops)).unwrap();
        let h = cfg.hits();
        assert_eq!(h.len(), 2);
        assert_eq!((h[0].loop_index, h[0].sigma, h[0].gamma_index), (0, 1.0, Some(1)));
        assert_eq!(h[0].roots, vec![3.0]);
        assert_eq!((h[1].loop_index, h[1].sigma), (2, 0.0));
        assert_eq!(h[1].roots, vec![0.0, 2.0]);
        assert_eq!(cfg.total_time(), 2.0 + 4.0 + 4.0);
        assert_eq!(small_loop_time(&cfg, 4.0), 8.0);
        assert_eq!(small_loop_time(&cfg, 3.0), 0.0);
    }

    #[test]
    fn continuum_hit_matches_lattice_hit() {
        let loops = vec![Loop::lattice(vec![v(1, 1), v(1, 0), v(1, -1), v(1, 0), v(1, 1)], 1.0, 1.0).unwrap()];
        let lat = build_configuration(&straight(), &LoopSoup::new(loops.clone())).unwrap();
        let cg = SimplePath::new(straight().path().to_continuum()).unwrap();
        let cl: Vec<Loop> = loops.iter().map(|l| Loop::new(l.path().to_continuum()).unwrap()).collect();
        let con = build_configuration(&cg, &LoopSoup::new(cl)).unwrap();
        assert_eq!(lat.hits()[0].sigma, con.hits()[0].sigma);
        assert_eq!(lat.hits()[0].roots, con.hits()[0].roots);
        assert!(con.hits()[0].ambiguous);
    }

    #[test]
    fn continuum_transversal_crossing() {
        let g = SimplePath::new(TimedPath::continuum(vec![(0.0, Point::ORIGIN), (2.0, Point::new(2.0, 0.0))]).unwrap())
            .unwrap();
        let l = Loop::new(
            TimedPath::continuum(vec![
                (0.0, Point::new(0.5, 1.0)),
                (1.0, Point::new(0.5, -1.0)),
                (2.0, Point::new(1.5, -1.0)),
                (3.0, Point::new(1.5, 1.0)),
                (4.0, Point::new(0.5, 1.0)),
            ])
            .unwrap(),
        )
        .unwrap();
        let cfg = build_configuration(&g, &LoopSoup::new(vec![l])).unwrap();
        let h = &cfg.hits()[0];
        assert!((h.sigma - 0.5).abs() < 1e-15);
        assert_eq!(h.roots, vec![0.5]);
        assert!(!h.ambiguous);
    }

    #[test]
    fn mismatched_meshes_are_rejected() {
        let loops = vec![Loop::lattice(vec![v(0, 0), v(0, 1), v(0, 0)], 2.0, 1.0).unwrap()];
        assert!(matches!(build_configuration(&straight(), &LoopSoup::new(loops)), Err(Error::Mismatch(_))));
    }

    #[test]
    fn sigma_classes_group_ties() {
        let loops = vec![
            Loop::lattice(vec![v(1, 0), v(1, 1), v(1, 0)], 1.0, 1.0).unwrap(),
            Loop::lattice(vec![v(0, 0), v(0, 1), v(0, 0)], 1.0, 1.0).unwrap(),
            Loop::lattice(vec![v(1, 0), v(1, -1), v(1, 0)], 1.0, 1.0).unwrap(),
        ];
        let cfg = build_configuration(&straight(), &LoopSoup::new(loops)).unwrap();
        assert_eq!(cfg.sigma_classes(), vec![vec![1], vec![0, 2]]);
    }
}
