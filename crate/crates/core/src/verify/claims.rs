//! Executable checks of the two arborescence-cut statements behind the
//! feasibility argument.
//!
//! Path/cut duality: `H'` has a `u -> v` path of length at most `K` exactly
//! when every arborescence `T` rooted at `u` with `d_T(u, v) > K` has a
//! shortcut edge in `H'`.
//!
//! Cut mass: for the LP values `x` of a feasible solution, every such long
//! arborescence of `G[V_uv]` with `K = k * len(u, v)` has `sum_{S_T} x >= 1`.

use crate::graph::{induced_subgraph, shortest_paths, DiGraph, Direction};
use crate::paths::{covered_vertices, enumerate_demand_paths, PathCaps, PathError};

use super::arborescence::{enumerate_arborescences, ArborescenceError, Family};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClaimError {
    #[error(transparent)]
    Arborescence(#[from] ArborescenceError),
    #[error(transparent)]
    Paths(#[from] PathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathCutOutcome {
    /// `dist_{H'}(u, v) <= K`.
    pub path_side: bool,
    /// Every long arborescence meets `H'` in its shortcut set.
    pub cut_side: bool,
    pub trees: usize,
    pub long_trees: usize,
}

impl PathCutOutcome {
    pub fn agrees(&self) -> bool {
        self.path_side == self.cut_side
    }
}

/// Evaluates both sides of the path/cut equivalence on `g_prime` with
/// `h_edges` (edge ids of `g_prime`).
pub fn check_claim1(
    g_prime: &DiGraph,
    h_edges: &[usize],
    u: usize,
    v: usize,
    bound: f64,
    family: Family,
    cap: usize,
) -> Result<PathCutOutcome, ClaimError> {
    let (h, _) = super::spanner::sub_on(g_prime, h_edges);
    let path_side = shortest_paths(&h, u, Direction::Outward).dist[v] <= bound;

    let mut in_h = vec![false; g_prime.m()];
    for &e in h_edges {
        in_h[e] = true;
    }
    let mut out = PathCutOutcome {
        path_side,
        cut_side: true,
        trees: 0,
        long_trees: 0,
    };
    for t in enumerate_arborescences(g_prime, u, family, cap)? {
        let t = t?;
        out.trees += 1;
        if t.depth(v) > bound {
            out.long_trees += 1;
            if !t.cut_set.iter().any(|&e| in_h[e]) {
                out.cut_side = false;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutMassOutcome {
    pub trees: usize,
    pub long_trees: usize,
    /// Smallest `sum_{e in S_T} x_e` over long trees; `+inf` if none.
    pub min_cut_mass: f64,
}

impl CutMassOutcome {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_cut_mass >= 1.0 - tol
    }
}

/// Minimum shortcut mass over arborescences of `g_prime` rooted at `u` with
/// `d_T(u, v) > bound`. `x` is indexed by edge ids of `g_prime`.
pub fn check_claim2(
    x: &[f64],
    g_prime: &DiGraph,
    u: usize,
    v: usize,
    bound: f64,
    family: Family,
    cap: usize,
) -> Result<CutMassOutcome, ClaimError> {
    assert_eq!(x.len(), g_prime.m());
    let mut out = CutMassOutcome {
        trees: 0,
        long_trees: 0,
        min_cut_mass: f64::INFINITY,
    };
    for t in enumerate_arborescences(g_prime, u, family, cap)? {
        let t = t?;
        out.trees += 1;
        if t.depth(v) > bound {
            out.long_trees += 1;
            let mass: f64 = t.cut_set.iter().map(|&e| x[e]).sum();
            out.min_cut_mass = out.min_cut_mass.min(mass);
        }
    }
    Ok(out)
}

/// Cut-mass check for demand `demand` of `g`: restricts `x` to
/// `G[V_uv]` and uses `K = k * len(u, v)`. Returns the outcome together
/// with `|V_uv|`.
pub fn check_claim2_for_demand(
    g: &DiGraph,
    k: f64,
    x: &[f64],
    demand: usize,
    caps: PathCaps,
    family: Family,
    cap: usize,
) -> Result<(CutMassOutcome, usize), ClaimError> {
    let dp = enumerate_demand_paths(g, k, demand, caps)?;
    let covered = covered_vertices(&dp)?;
    let sub = induced_subgraph(g, &covered);
    let e = g.edge(demand);
    let u = sub.local_vertex(e.tail).expect("tail is covered");
    let v = sub.local_vertex(e.head).expect("head is covered");
    let local_x: Vec<f64> = sub.edge_map.iter().map(|&id| x[id]).collect();
    let out = check_claim2(&local_x, &sub.graph, u, v, k * e.len, family, cap)?;
    Ok((out, covered.len()))
}
