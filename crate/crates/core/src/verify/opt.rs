//! Exact minimum k-spanner by branch-and-bound over non-mandatory edges.

use thiserror::Error;

use crate::graph::{shortest_paths, DiGraph, Direction};

pub const DEFAULT_MAX_FREE_EDGES: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{free} free edges exceed the cap of {cap}")]
    TooLarge { free: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub opt: usize,
    /// Sorted edge ids of one minimum spanner.
    pub witness: Vec<usize>,
    pub mandatory: Vec<usize>,
    pub nodes: u64,
}

/// Edges `(u, v)` with no other `u -> v` route within `k * dist(u, v)`.
/// Every k-spanner contains them.
pub fn mandatory_edges(g: &DiGraph, k: f64) -> Vec<usize> {
    (0..g.m())
        .filter(|&e| {
            let (u, v) = (g.edge(e).tail, g.edge(e).head);
            let budget = k * shortest_paths(g, u, Direction::Outward).dist[v];
            let others: Vec<usize> = (0..g.m()).filter(|&f| f != e).collect();
            let without = g.edge_subgraph(&others);
            !(shortest_paths(&without, u, Direction::Outward).dist[v] <= budget)
        })
        .collect()
}

struct Search<'a> {
    g: &'a DiGraph,
    budgets: Vec<f64>,
    free: Vec<usize>,
    chosen: Vec<bool>,
    best: usize,
    best_set: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    /// Demand edges violated by the edges marked in `on`.
    fn unsatisfied(&self, on: &[bool]) -> Vec<usize> {
        let ids: Vec<usize> = (0..self.g.m()).filter(|&e| on[e]).collect();
        let h = self.g.edge_subgraph(&ids);
        let mut bad = Vec::new();
        for u in 0..self.g.n() {
            let outs = self.g.out_edges(u);
            if outs.is_empty() {
                continue;
            }
            let dh = shortest_paths(&h, u, Direction::Outward).dist;
            bad.extend(
                outs.iter()
                    .copied()
                    .filter(|&e| !(dh[self.g.edge(e).head] <= self.budgets[e])),
            );
        }
        bad
    }

    /// At least one new edge per unsatisfied tail without an out-edge, and
    /// likewise per head without an in-edge.
    fn lower_bound(&self, unsat: &[usize]) -> usize {
        if unsat.is_empty() {
            return 0;
        }
        let n = self.g.n();
        let mut has_out = vec![false; n];
        let mut has_in = vec![false; n];
        for (e, _) in self.chosen.iter().enumerate().filter(|(_, &c)| c) {
            has_out[self.g.edge(e).tail] = true;
            has_in[self.g.edge(e).head] = true;
        }
        let mut tails = vec![false; n];
        let mut heads = vec![false; n];
        for &e in unsat {
            let ed = self.g.edge(e);
            if !has_out[ed.tail] {
                tails[ed.tail] = true;
            }
            if !has_in[ed.head] {
                heads[ed.head] = true;
            }
        }
        let t = tails.iter().filter(|&&b| b).count();
        let h = heads.iter().filter(|&&b| b).count();
        t.max(h).max(1)
    }

    fn dfs(&mut self, idx: usize, count: usize) {
        self.nodes += 1;
        let unsat = self.unsatisfied(&self.chosen);
        if unsat.is_empty() {
            if count < self.best {
                self.best = count;
                self.best_set = (0..self.g.m()).filter(|&e| self.chosen[e]).collect();
            }
            return;
        }
        if idx == self.free.len() || count + self.lower_bound(&unsat) >= self.best {
            return;
        }
        let mut optimistic = self.chosen.clone();
        for &e in &self.free[idx..] {
            optimistic[e] = true;
        }
        if !self.unsatisfied(&optimistic).is_empty() {
            return;
        }
        let e = self.free[idx];
        self.chosen[e] = true;
        self.dfs(idx + 1, count + 1);
        self.chosen[e] = false;
        self.dfs(idx + 1, count);
    }
}

/// Minimum number of edges of a k-spanner of `g`. Free edges are branched on
/// in decreasing `hint` order (typically LP values), include-branch first.
pub fn brute_force_opt(
    g: &DiGraph,
    k: f64,
    max_free_edges: usize,
    hint: Option<&[f64]>,
) -> Result<OptResult, OracleError> {
    let mandatory = mandatory_edges(g, k);
    let mut is_mandatory = vec![false; g.m()];
    for &e in &mandatory {
        is_mandatory[e] = true;
    }
    let mut free: Vec<usize> = (0..g.m()).filter(|&e| !is_mandatory[e]).collect();
    if free.len() > max_free_edges {
        return Err(OracleError::TooLarge {
            free: free.len(),
            cap: max_free_edges,
        });
    }
    if let Some(h) = hint {
        free.sort_by(|&a, &b| h[b].total_cmp(&h[a]).then(a.cmp(&b)));
    }
    let budgets = (0..g.m())
        .map(|e| {
            let ed = g.edge(e);
            k * shortest_paths(g, ed.tail, Direction::Outward).dist[ed.head]
        })
        .collect();
    let mut s = Search {
        g,
        budgets,
        free,
        chosen: is_mandatory,
        best: g.m() + 1,
        best_set: (0..g.m()).collect(),
        nodes: 0,
    };
    s.dfs(0, mandatory.len());
    Ok(OptResult {
        opt: s.best_set.len(),
        witness: s.best_set,
        mandatory,
        nodes: s.nodes,
    })
}
