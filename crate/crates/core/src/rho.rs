//! The reparametrisation distance
//! `rho(f, g) = inf_phi ( ||f - g o phi|| + ||phi - Id|| )` over increasing
//! bijections `phi : [0, t_f] -> [0, t_g]`.
//!
//! Since `||phi^{-1} - Id||` equals `||phi - Id||`, the objective is that of a
//! monotone coupling of the two time intervals. Candidate couplings come from
//! the linear reparametrisation and from bottleneck dynamic programmes on a
//! uniform grid restricted to bands `|s - u| <= eta`; the objective of each
//! candidate is then evaluated exactly, so the returned value is always the
//! cost of an admissible coupling and hence an upper bound on `rho`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::Point;
use crate::path::TimedPath;

/// Grid resolution used when none is specified.
pub const DEFAULT_RHO_GRID: usize = 256;

/// Result of [`rho`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    /// Cost of the best coupling found; never below the true distance.
    pub value: f64,
    /// `omega_h(f) + omega_h(g) + h` for the grid spacing `h`, bounding how far
    /// the best grid coupling can be from the infimum.
    pub error_bound: f64,
}

/// Estimate `rho(f, g)` on a `grid x grid` lattice of time pairs.
pub fn rho(f: &TimedPath, g: &TimedPath, grid: usize) -> RhoEstimate {
    let grid = grid.max(2);
    let (tf, tg) = (f.duration(), g.duration());
    if tf == 0.0 || tg == 0.0 {
        let value = if tf == 0.0 && tg == 0.0 { f.start().dist(g.start()) } else { f64::INFINITY };
        return RhoEstimate { value, error_bound: 0.0 };
    }
    let h = tf.max(tg) / (grid - 1) as f64;
    let error_bound = f.modulus(h) + g.modulus(h) + h;
    let value = one_way(f, g, grid).min(one_way(g, f, grid));
    RhoEstimate { value, error_bound }
}

fn one_way(f: &TimedPath, g: &TimedPath, grid: usize) -> f64 {
    let (tf, tg) = (f.duration(), g.duration());
    let mut best = coupling_cost(f, g, &[(0.0, 0.0), (tf, tg)]);
    let s: Vec<f64> = (0..grid).map(|i| if i + 1 == grid { tf } else { tf * i as f64 / (grid - 1) as f64 }).collect();
    let u: Vec<f64> = (0..grid).map(|j| if j + 1 == grid { tg } else { tg * j as f64 / (grid - 1) as f64 }).collect();
    let fv: Vec<Point> = s.iter().map(|&t| f.eval_clamped(t)).collect();
    let gv: Vec<Point> = u.iter().map(|&t| g.eval_clamped(t)).collect();
    let base = (tf - tg).abs();
    let h = tf.max(tg) / (grid - 1) as f64;
    let top = tf.max(tg);
    let mut etas: Vec<f64> = Vec::new();
    let mut m = 1.0;
    while base + m * h < top {
        etas.push(base + m * h);
        m = if m < 4.0 { m + 1.0 } else { m * 1.5 };
    }
    etas.push(f64::INFINITY);
    let mut cost = vec![0.0f64; grid * grid];
    let mut from = vec![0u8; grid * grid];
    for &eta in &etas {
        if let Some(nodes) = bottleneck(&s, &u, &fv, &gv, eta, &mut cost, &mut from) {
            best = best.min(coupling_cost(f, g, &nodes));
        }
    }
    best
}

/// Bottleneck monotone path through the band `|s_i - u_j| <= eta` from
/// `(0, 0)` to `(G-1, G-1)`, minimising the largest `|f(s_i) - g(u_j)|`.
fn bottleneck(
    s: &[f64],
    u: &[f64],
    fv: &[Point],
    gv: &[Point],
    eta: f64,
    cost: &mut [f64],
    from: &mut [u8],
) -> Option<Vec<(f64, f64)>> {
    let n = s.len();
    let m = u.len();
    for i in 0..n {
        for j in 0..m {
            let k = i * m + j;
            if (s[i] - u[j]).abs() > eta && !(i == 0 && j == 0) && !(i + 1 == n && j + 1 == m) {
                cost[k] = f64::INFINITY;
                continue;
            }
            let here = fv[i].dist(gv[j]);
            if i == 0 && j == 0 {
                cost[k] = here;
                from[k] = 0;
                continue;
            }
            let mut prev = f64::INFINITY;
            let mut dir = 0u8;
            if i > 0 && j > 0 && cost[k - m - 1] < prev {
                prev = cost[k - m - 1];
                dir = 3;
            }
            if i > 0 && cost[k - m] < prev {
                prev = cost[k - m];
                dir = 1;
            }
            if j > 0 && cost[k - 1] < prev {
                prev = cost[k - 1];
                dir = 2;
            }
            cost[k] = prev.max(here);
            from[k] = dir;
        }
    }
    if !cost[n * m - 1].is_finite() {
        return None;
    }
    let mut nodes = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    loop {
        nodes.push((s[i], u[j]));
        match from[i * m + j] {
            0 => break,
            1 => i -= 1,
            2 => j -= 1,
            _ => {
                i -= 1;
                j -= 1;
            }
        }
    }
    nodes.reverse();
    Some(nodes)
}

/// Exact cost `sup |f(s) - g(u)| + sup |s - u|` of the monotone coupling whose
/// graph is the polyline through `nodes`.
pub fn coupling_cost(f: &TimedPath, g: &TimedPath, nodes: &[(f64, f64)]) -> f64 {
    let mut space: f64 = 0.0;
    let mut time: f64 = 0.0;
    let ft = f.times();
    let gt = g.times();
    let mut rs: Vec<f64> = Vec::new();
    for w in nodes.windows(2) {
        let ((sa, ua), (sb, ub)) = (w[0], w[1]);
        time = time.max((sa - ua).abs()).max((sb - ub).abs());
        rs.clear();
        rs.push(0.0);
        rs.push(1.0);
        if sb > sa {
            let lo = ft.partition_point(|&t| t <= sa);
            let hi = ft.partition_point(|&t| t < sb);
            rs.extend(ft[lo..hi].iter().map(|&t| (t - sa) / (sb - sa)));
        }
        if ub > ua {
            let lo = gt.partition_point(|&t| t <= ua);
            let hi = gt.partition_point(|&t| t < ub);
            rs.extend(gt[lo..hi].iter().map(|&t| (t - ua) / (ub - ua)));
        }
        for &r in &rs {
            let sv = if r >= 1.0 { sb } else { sa + r * (sb - sa) };
            let uv = if r >= 1.0 { ub } else { ua + r * (ub - ua) };
            space = space.max(f.eval_clamped(sv).dist(g.eval_clamped(uv)));
        }
    }
    space + time
}
