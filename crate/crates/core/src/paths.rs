//! Stretch-bounded path families: for a demand edge `(u, v)` all directed
//! `u -> v` paths of length at most `k * dist(u, v)`, and the set of vertices
//! those paths cover.

use thiserror::Error;

use crate::graph::{shortest_paths, DiGraph, Direction};

pub const DEFAULT_MAX_PATHS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("demand edge {demand}: more than {limit} paths within budget")]
    PathExplosion { demand: usize, limit: usize },
    #[error("demand edge {demand}: enumeration stopped at the hop cap, path set incomplete")]
    IncompleteEnumeration { demand: usize },
    #[error("stretch factor {0} is below 1")]
    BadStretch(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathCaps {
    pub max_paths: usize,
    /// `None` means `n - 1`, which never binds for simple paths.
    pub max_hops: Option<usize>,
}

impl Default for PathCaps {
    fn default() -> Self {
        PathCaps {
            max_paths: DEFAULT_MAX_PATHS,
            max_hops: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandPaths {
    pub demand: usize,
    pub budget: f64,
    pub paths: Vec<Path>,
    /// False when the hop cap cut off a branch that was still within budget.
    pub complete: bool,
}

impl DemandPaths {
    /// The only budget-feasible path is the demand edge itself.
    pub fn is_mandatory(&self) -> bool {
        self.complete && self.paths.len() == 1 && self.paths[0].edges == [self.demand]
    }
}

/// `k * dist(u, v)` for demand edge `(u, v)`.
pub fn stretch_budget(g: &DiGraph, k: f64, demand: usize) -> f64 {
    let e = g.edge(demand);
    k * shortest_paths(g, e.tail, Direction::Outward).dist[e.head]
}

/// All simple paths for `demand` within its stretch budget.
pub fn enumerate_demand_paths(
    g: &DiGraph,
    k: f64,
    demand: usize,
    caps: PathCaps,
) -> Result<DemandPaths, PathError> {
    enumerate(g, k, demand, caps, true)
}

/// Like [`enumerate_demand_paths`] but walks may revisit vertices; only the
/// hop cap bounds them, so `caps.max_hops` should be set explicitly.
pub fn enumerate_demand_walks(
    g: &DiGraph,
    k: f64,
    demand: usize,
    caps: PathCaps,
) -> Result<DemandPaths, PathError> {
    enumerate(g, k, demand, caps, false)
}

struct Search<'a> {
    g: &'a DiGraph,
    target: usize,
    budget: f64,
    to_target: Vec<f64>,
    max_hops: usize,
    max_paths: usize,
    simple: bool,
    on_path: Vec<bool>,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    out: Vec<Path>,
    hit_hop_cap: bool,
}

impl Search<'_> {
    fn dfs(&mut self, v: usize, len: f64) -> bool {
        if v == self.target {
            if self.out.len() == self.max_paths {
                return false;
            }
            self.out.push(Path {
                vertices: self.vertices.clone(),
                edges: self.edges.clone(),
                length: len,
            });
            if self.simple {
                return true;
            }
        }
        let g = self.g;
        for &e in g.out_edges(v) {
            let w = g.edge(e).head;
            let next = len + g.edge(e).len;
            if (self.simple && self.on_path[w]) || next + self.to_target[w] > self.budget {
                continue;
            }
            if self.edges.len() == self.max_hops {
                self.hit_hop_cap = true;
                continue;
            }
            self.on_path[w] = true;
            self.vertices.push(w);
            self.edges.push(e);
            let ok = self.dfs(w, next);
            self.edges.pop();
            self.vertices.pop();
            self.on_path[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

fn enumerate(
    g: &DiGraph,
    k: f64,
    demand: usize,
    caps: PathCaps,
    simple: bool,
) -> Result<DemandPaths, PathError> {
    if !(k >= 1.0) {
        return Err(PathError::BadStretch(k));
    }
    let e = g.edge(demand);
    let budget = stretch_budget(g, k, demand);
    let mut search = Search {
        g,
        target: e.head,
        budget,
        to_target: shortest_paths(g, e.head, Direction::Inward).dist,
        max_hops: caps.max_hops.unwrap_or(g.n().saturating_sub(1)),
        max_paths: caps.max_paths,
        simple,
        on_path: vec![false; g.n()],
        vertices: vec![e.tail],
        edges: Vec::new(),
        out: Vec::new(),
        hit_hop_cap: false,
    };
    search.on_path[e.tail] = true;
    if !search.dfs(e.tail, 0.0) {
        return Err(PathError::PathExplosion {
            demand,
            limit: caps.max_paths,
        });
    }
    Ok(DemandPaths {
        demand,
        budget,
        paths: search.out,
        complete: !search.hit_hop_cap,
    })
}

/// Vertices `w` with `dist(u, w) + dist(w, v)` within the demand's budget.
/// Every covered vertex is among them.
pub fn budget_reachable_vertices(g: &DiGraph, k: f64, demand: usize) -> Vec<usize> {
    let e = g.edge(demand);
    let from = shortest_paths(g, e.tail, Direction::Outward).dist;
    let to = shortest_paths(g, e.head, Direction::Inward).dist;
    let budget = k * from[e.head];
    (0..g.n()).filter(|&w| from[w] + to[w] <= budget).collect()
}

/// Union of the vertices on all paths, sorted.
pub fn covered_vertices(dp: &DemandPaths) -> Result<Vec<usize>, PathError> {
    if !dp.complete {
        return Err(PathError::IncompleteEnumeration { demand: dp.demand });
    }
    assert!(
        !dp.paths.is_empty(),
        "demand {} has no path within budget; the shortest path always qualifies",
        dp.demand
    );
    let mut vs: Vec<usize> = dp.paths.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    vs.sort_unstable();
    vs.dedup();
    Ok(vs)
}
