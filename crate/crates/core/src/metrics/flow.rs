//! Maximum flow (Dinic) and feasibility of flows with lower bounds.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
}

/// A flow network with integer capacities.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Add an edge and return its id; the reverse residual edge is `id ^ 1`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently pushed through edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.edges[id ^ 1].cap
    }

    fn levels(&self, s: usize) -> Vec<i32> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && level[to] < 0 {
                    level[to] = level[u] + 1;
                    q.push_back(to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: i64, level: &[i32], it: &mut [usize]) -> i64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && level[to] == level[u] + 1 {
                let got = self.augment(to, t, pushed.min(cap), level, it);
                if got > 0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0
    }

    /// Maximum flow from `s` to `t`.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return total;
            }
            let mut it = vec![0usize; self.adj.len()];
            loop {
                let f = self.augment(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}

/// A network whose edges carry lower and upper bounds.
#[derive(Debug, Clone)]
pub struct BoundedFlow {
    net: FlowNetwork,
    nodes: usize,
    excess: Vec<i64>,
    lower: Vec<(usize, i64)>,
}

impl BoundedFlow {
    pub fn new(nodes: usize) -> Self {
        BoundedFlow { net: FlowNetwork::new(nodes), nodes, excess: vec![0; nodes], lower: Vec::new() }
    }

    /// Edge carrying between `lo` and `hi` units; returns its id.
    pub fn add_edge(&mut self, from: usize, to: usize, lo: i64, hi: i64) -> usize {
        let id = self.net.add_edge(from, to, hi - lo);
        self.excess[to] += lo;
        self.excess[from] -= lo;
        self.lower.push((id, lo));
        id
    }

    /// Flow on an edge after a successful [`feasible_circulation`](Self::feasible_circulation).
    pub fn flow(&self, id: usize) -> i64 {
        let lo = self.lower.iter().find(|(e, _)| *e == id).map(|(_, l)| *l).unwrap_or(0);
        self.net.flow(id) + lo
    }

    /// Decide whether a circulation meeting all bounds exists (add an
    /// unbounded `t -> s` edge beforehand for an `s`-`t` flow).
    pub fn feasible_circulation(&mut self) -> bool {
        let ss = self.net.add_node();
        let tt = self.net.add_node();
        let mut need = 0;
        for v in 0..self.nodes {
            let e = self.excess[v];
            if e > 0 {
                self.net.add_edge(ss, v, e);
                need += e;
            } else if e < 0 {
                self.net.add_edge(v, tt, -e);
            }
        }
        self.net.max_flow(ss, tt) == need
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max_flow() {
        // CLRS figure: max flow 23
        let mut n = FlowNetwork::new(6);
        for (a, b, c) in
            [(0, 1, 16), (0, 2, 13), (1, 3, 12), (2, 1, 4), (2, 4, 14), (3, 2, 9), (3, 5, 20), (4, 3, 7), (4, 5, 4)]
        {
            n.add_edge(a, b, c);
        }
        assert_eq!(n.max_flow(0, 5), 23);
    }

    #[test]
    fn lower_bounds_can_make_flows_infeasible() {
        // s -> a must carry at least 2 but a -> t allows only 1
        let mut f = BoundedFlow::new(3);
        f.add_edge(0, 1, 2, 3);
        f.add_edge(1, 2, 0, 1);
        f.add_edge(2, 0, 0, 100);
        assert!(!f.feasible_circulation());
        let mut g = BoundedFlow::new(3);
        let e = g.add_edge(0, 1, 1, 3);
        g.add_edge(1, 2, 0, 2);
        g.add_edge(2, 0, 0, 100);
        assert!(g.feasible_circulation());
        assert!(g.flow(e) >= 1);
    }
}
