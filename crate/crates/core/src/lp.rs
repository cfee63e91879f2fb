//! The flow-based LP relaxation of Directed k-Spanner.
//!
//! One variable `x_e` per edge and one flow variable per (demand, path).
//! For every demand edge `(u, v)` the flow over its stretch-bounded paths
//! must reach 1, and for every edge `e` the flow of that demand through `e`
//! is at most `x_e`. The objective is `min sum x_e`.
//!
//! [`build_layered_lp_unit`] gives an equivalent edge-flow formulation for
//! unit lengths whose size does not depend on the number of paths.

use thiserror::Error;

use crate::graph::DiGraph;
use crate::paths::{enumerate_demand_paths, DemandPaths, Path, PathCaps, PathError};
use crate::simplex::{self, Cmp, LinearProgram, SimplexError, SimplexOptions};

/// Feasibility tolerance for solutions.
pub const FEAS_TOL: f64 = 1e-9;
/// Tolerance for comparing objective values.
pub const OBJ_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error(transparent)]
    Paths(#[from] PathError),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("layered formulation needs unit lengths (edge {0} is not)")]
    NotUnitLength(usize),
}

impl From<SimplexError> for LpError {
    fn from(e: SimplexError) -> Self {
        LpError::NumericalFailure(e.to_string())
    }
}

/// Paths of one demand. A `fixed` block has the demand edge as its only
/// path; the solver pins `x_e >= 1` instead of emitting rows for it.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandBlock {
    pub demand: usize,
    pub paths: Vec<Path>,
    pub fixed: bool,
}

impl DemandBlock {
    /// Edges used by any path, sorted.
    pub fn used_edges(&self) -> Vec<usize> {
        let mut es: Vec<usize> = self.paths.iter().flat_map(|p| p.edges.iter().copied()).collect();
        es.sort_unstable();
        es.dedup();
        es
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub num_edges: usize,
    pub blocks: Vec<DemandBlock>,
}

/// Variable and row counts of the unreduced model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub edge_vars: usize,
    pub path_vars: usize,
    pub demand_rows: usize,
    pub capacity_rows: usize,
}

impl LpModel {
    /// Model over explicit path families, one per demand edge. With
    /// `presolve`, demands whose only path is the edge itself become fixed.
    pub fn from_families(
        g: &DiGraph,
        families: Vec<DemandPaths>,
        presolve: bool,
    ) -> Result<Self, LpError> {
        let mut blocks = Vec::with_capacity(families.len());
        for dp in families {
            if !dp.complete {
                return Err(PathError::IncompleteEnumeration { demand: dp.demand }.into());
            }
            blocks.push(DemandBlock {
                demand: dp.demand,
                fixed: presolve && dp.is_mandatory(),
                paths: dp.paths,
            });
        }
        Ok(LpModel {
            num_edges: g.m(),
            blocks,
        })
    }

    pub fn size(&self) -> ModelSize {
        ModelSize {
            edge_vars: self.num_edges,
            path_vars: self.blocks.iter().map(|b| b.paths.len()).sum(),
            demand_rows: self.blocks.len(),
            capacity_rows: self.blocks.iter().map(|b| b.used_edges().len()).sum(),
        }
    }

    /// The whole reduced program handed to [`solve_lp_direct`] (fixed
    /// demands become lower bounds), plus the first flow variable of each
    /// non-fixed block.
    pub fn to_program(&self) -> (LinearProgram, Vec<Option<usize>>) {
        let m = self.num_edges;
        let free_paths: usize = self
            .blocks
            .iter()
            .filter(|b| !b.fixed)
            .map(|b| b.paths.len())
            .sum();
        let mut lp = LinearProgram::with_vars(m + free_paths);
        lp.objective[..m].fill(1.0);
        let mut offsets = Vec::with_capacity(self.blocks.len());
        let mut next = m;
        for b in &self.blocks {
            if b.fixed {
                lp.lower[b.demand] = 1.0;
                offsets.push(None);
                continue;
            }
            offsets.push(Some(next));
            lp.add(
                (0..b.paths.len()).map(|i| (next + i, 1.0)).collect(),
                Cmp::Ge,
                1.0,
            );
            for e in b.used_edges() {
                let mut row: Vec<(usize, f64)> = b
                    .paths
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.edges.contains(&e))
                    .map(|(i, _)| (next + i, 1.0))
                    .collect();
                row.push((e, -1.0));
                lp.add(row, Cmp::Le, 0.0);
            }
            next += b.paths.len();
        }
        (lp, offsets)
    }

    /// Variable names for LP-format export: `x<e>` and `f<demand>_<path>`.
    pub fn variable_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.num_edges).map(|e| format!("x{e}")).collect();
        for b in self.blocks.iter().filter(|b| !b.fixed) {
            names.extend((0..b.paths.len()).map(|i| format!("f{}_{}", b.demand, i)));
        }
        names
    }

    pub fn to_lp_format(&self) -> String {
        self.to_program().0.to_lp_format(&self.variable_names())
    }
}

/// Path model with the default presolve.
pub fn build_lp(g: &DiGraph, k: f64, caps: PathCaps) -> Result<LpModel, LpError> {
    build_lp_with(g, k, caps, true)
}

pub fn build_lp_with(
    g: &DiGraph,
    k: f64,
    caps: PathCaps,
    presolve: bool,
) -> Result<LpModel, LpError> {
    let families = (0..g.m())
        .map(|d| enumerate_demand_paths(g, k, d, caps))
        .collect::<Result<Vec<_>, _>>()?;
    LpModel::from_families(g, families, presolve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// `flows[b][i]` is the flow on path `i` of block `b` of the model.
    pub flows: Vec<Vec<f64>>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// Largest violation of each constraint class, recomputed from the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub demand_shortfall: f64,
    pub capacity_excess: f64,
    pub negativity: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.demand_shortfall
            .max(self.capacity_excess)
            .max(self.negativity)
    }

    pub fn feasible(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Evaluates every constraint of the unreduced model against `sol`.
pub fn residuals(model: &LpModel, sol: &LpSolution) -> Residuals {
    let mut r = Residuals {
        demand_shortfall: 0.0,
        capacity_excess: 0.0,
        negativity: 0.0,
    };
    for &x in &sol.x {
        r.negativity = r.negativity.max(-x);
    }
    for (b, f) in model.blocks.iter().zip(&sol.flows) {
        let total: f64 = f.iter().sum();
        r.demand_shortfall = r.demand_shortfall.max(1.0 - total);
        for &v in f {
            r.negativity = r.negativity.max(-v);
        }
        let mut load = vec![0.0; model.num_edges];
        for (p, &v) in b.paths.iter().zip(f) {
            let mut es = p.edges.clone();
            es.sort_unstable();
            es.dedup();
            for e in es {
                load[e] += v;
            }
        }
        for (e, l) in load.iter().enumerate() {
            r.capacity_excess = r.capacity_excess.max(l - sol.x[e]);
        }
    }
    r
}

/// Upper limit on cutting-plane rounds in [`solve_lp`].
const MAX_ROUNDS: usize = 10_000;

fn finish(model: &LpModel, x: Vec<f64>, flows: Vec<Vec<f64>>, iterations: usize, tol: f64) -> Result<LpSolution, LpError> {
    let out = LpSolution {
        objective_value: x.iter().sum(),
        x,
        flows,
        iterations,
    };
    let res = residuals(model, &out);
    if !res.feasible(tol) {
        return Err(LpError::NumericalFailure(format!(
            "solution violates the model by {:e}",
            res.max()
        )));
    }
    Ok(out)
}

/// Most flow one block can route under capacities `x`, with a cut
/// `sum_e w_e x_e >= 1` that every path of the block satisfies.
struct Separation {
    value: f64,
    flows: Vec<f64>,
    cut: Vec<(usize, f64)>,
    iterations: usize,
}

fn separate(b: &DemandBlock, x: &[f64], opts: SimplexOptions) -> Result<Separation, LpError> {
    let edges = b.used_edges();
    let path_edges: Vec<Vec<usize>> = b
        .paths
        .iter()
        .map(|p| {
            let mut es = p.edges.clone();
            es.sort_unstable();
            es.dedup();
            es
        })
        .collect();
    let mut lp = LinearProgram::with_vars(b.paths.len());
    lp.objective.fill(-1.0);
    for &e in &edges {
        let row = path_edges
            .iter()
            .enumerate()
            .filter(|(_, es)| es.binary_search(&e).is_ok())
            .map(|(i, _)| (i, 1.0))
            .collect();
        lp.add(row, Cmp::Le, x[e].max(0.0));
    }
    let sol = simplex::solve(&lp, opts)?;
    // Capacity multipliers, rescaled so every path weighs at least 1; then
    // the cut holds for every x that routes a unit of flow.
    let mut w = vec![0.0; x.len()];
    for (&e, &y) in edges.iter().zip(&sol.duals) {
        w[e] = (-y).max(0.0);
    }
    let lightest = path_edges
        .iter()
        .map(|es| es.iter().map(|&e| w[e]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let cut = if lightest > 0.0 {
        edges.iter().filter(|&&e| w[e] > 0.0).map(|&e| (e, w[e] / lightest)).collect()
    } else {
        Vec::new()
    };
    Ok(Separation {
        value: -sol.objective,
        flows: sol.values,
        cut,
        iterations: sol.iterations,
    })
}

/// Solves the model by cutting planes over the edge variables alone and
/// re-checks feasibility against the full model with tolerance `tol`.
///
/// The master program is `min sum x_e` over the cuts found so far. Each
/// round, every demand solves its own max-flow over its paths under the
/// current `x`; a demand routing less than `1 - tol / 10` contributes the
/// cut from its capacity multipliers. When every demand routes a full unit,
/// those flows certify `x`.
pub fn solve_lp(model: &LpModel, tol: f64) -> Result<LpSolution, LpError> {
    let opts = SimplexOptions {
        tolerance: tol,
        ..Default::default()
    };
    let m = model.num_edges;
    let mut master = LinearProgram::with_vars(m);
    master.objective.fill(1.0);
    for b in model.blocks.iter().filter(|b| b.fixed) {
        master.lower[b.demand] = 1.0;
    }
    let mut iterations = 0;
    for _ in 0..MAX_ROUNDS {
        let sol = simplex::solve(&master, opts)?;
        iterations += sol.iterations;
        let x = sol.values;
        let mut flows = Vec::with_capacity(model.blocks.len());
        let mut cuts = 0;
        for b in &model.blocks {
            if b.fixed {
                flows.push(vec![1.0]);
                continue;
            }
            let sep = separate(b, &x, opts)?;
            iterations += sep.iterations;
            if sep.value < 1.0 - tol / 10.0 {
                if sep.cut.is_empty() {
                    return Err(LpError::NumericalFailure(format!(
                        "no cut separates demand {}",
                        b.demand
                    )));
                }
                master.add(sep.cut, Cmp::Ge, 1.0);
                cuts += 1;
            }
            flows.push(sep.flows);
        }
        if cuts == 0 {
            return finish(model, x, flows, iterations, tol);
        }
    }
    Err(LpError::NumericalFailure(format!(
        "no convergence after {MAX_ROUNDS} cutting-plane rounds"
    )))
}

/// Solves the whole path program in one simplex run.
pub fn solve_lp_direct(model: &LpModel, tol: f64) -> Result<LpSolution, LpError> {
    let (program, offsets) = model.to_program();
    let sol = simplex::solve(
        &program,
        SimplexOptions {
            tolerance: tol,
            ..Default::default()
        },
    )?;
    let x = sol.values[..model.num_edges].to_vec();
    let flows = model
        .blocks
        .iter()
        .zip(&offsets)
        .map(|(b, off)| match off {
            Some(o) => sol.values[*o..*o + b.paths.len()].to_vec(),
            None => vec![1.0],
        })
        .collect();
    finish(model, x, flows, sol.iterations, tol)
}

/// True when the LP value does not exceed the integer optimum.
pub fn lp_lower_bound_check(sol: &LpSolution, opt: usize, tol: f64) -> bool {
    sol.objective_value <= opt as f64 + tol
}

/// One demand of the layered model: vertex copies `(w, layer)` and arcs
/// between consecutive layers, pruned to those on some source-to-sink route.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredDemand {
    pub demand: usize,
    pub nodes: Vec<(usize, usize)>,
    /// `(from node, to node, edge id)`.
    pub arcs: Vec<(usize, usize, usize)>,
    pub source: usize,
    pub sinks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredModel {
    pub num_edges: usize,
    pub layers: usize,
    pub demands: Vec<LayeredDemand>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
}

/// Edge-flow model for unit lengths. Demand `(u, v)` routes one unit from
/// `(u, 0)` to any `(v, j)`, `1 <= j <= k`, through arcs
/// `(w, i) -> (w', i + 1)` for edges `(w, w')`. All copies of an edge share
/// the demand's capacity `x_e`.
pub fn build_layered_lp_unit(g: &DiGraph, k: f64) -> Result<LayeredModel, LpError> {
    if let Some(e) = g.edges().iter().position(|e| e.len != 1.0) {
        return Err(LpError::NotUnitLength(e));
    }
    if !(k >= 1.0) {
        return Err(PathError::BadStretch(k).into());
    }
    // dist(u, v) = 1 for every demand edge, so the budget is k hops.
    let layers = k.floor() as usize;
    let n = g.n();
    let demands = (0..g.m())
        .map(|d| {
            let (u, v) = (g.edge(d).tail, g.edge(d).head);
            let id = |w: usize, i: usize| i * n + w;
            let usable = |w: usize, i: usize| if i == 0 { w == u } else { w != u };
            let mut fwd = vec![false; n * (layers + 1)];
            fwd[id(u, 0)] = true;
            for i in 0..layers {
                for w in 0..n {
                    if !fwd[id(w, i)] || w == v {
                        continue;
                    }
                    for &e in g.out_edges(w) {
                        let h = g.edge(e).head;
                        if usable(h, i + 1) {
                            fwd[id(h, i + 1)] = true;
                        }
                    }
                }
            }
            let mut bwd = vec![false; n * (layers + 1)];
            for i in (0..=layers).rev() {
                for w in 0..n {
                    if !fwd[id(w, i)] {
                        continue;
                    }
                    if w == v {
                        bwd[id(w, i)] = i >= 1;
                    } else if i < layers {
                        bwd[id(w, i)] = g
                            .out_edges(w)
                            .iter()
                            .any(|&e| bwd[id(g.edge(e).head, i + 1)]);
                    }
                }
            }
            let mut index = vec![usize::MAX; n * (layers + 1)];
            let mut nodes = Vec::new();
            for i in 0..=layers {
                for w in 0..n {
                    if bwd[id(w, i)] {
                        index[id(w, i)] = nodes.len();
                        nodes.push((w, i));
                    }
                }
            }
            let mut arcs = Vec::new();
            for (a, &(w, i)) in nodes.iter().enumerate() {
                if w == v || i == layers {
                    continue;
                }
                for &e in g.out_edges(w) {
                    let b = index[id(g.edge(e).head, i + 1)];
                    if b != usize::MAX {
                        arcs.push((a, b, e));
                    }
                }
            }
            let sinks = nodes
                .iter()
                .enumerate()
                .filter(|(_, &(w, _))| w == v)
                .map(|(a, _)| a)
                .collect();
            LayeredDemand {
                demand: d,
                source: index[id(u, 0)],
                nodes,
                arcs,
                sinks,
            }
        })
        .collect();
    Ok(LayeredModel {
        num_edges: g.m(),
        layers,
        demands,
    })
}

impl LayeredModel {
    pub fn to_program(&self) -> LinearProgram {
        let m = self.num_edges;
        let arcs: usize = self.demands.iter().map(|d| d.arcs.len()).sum();
        let mut lp = LinearProgram::with_vars(m + arcs);
        lp.objective[..m].fill(1.0);
        let mut next = m;
        for d in &self.demands {
            let mut balance: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d.nodes.len()];
            let mut cap: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
            for (i, &(a, b, e)) in d.arcs.iter().enumerate() {
                balance[a].push((next + i, -1.0));
                balance[b].push((next + i, 1.0));
                cap[e].push((next + i, 1.0));
            }
            for (node, row) in balance.into_iter().enumerate() {
                if node == d.source {
                    let out = row.into_iter().map(|(j, a)| (j, -a)).collect();
                    lp.add(out, Cmp::Ge, 1.0);
                } else if !d.sinks.contains(&node) {
                    lp.add(row, Cmp::Eq, 0.0);
                }
            }
            for (e, mut row) in cap.into_iter().enumerate() {
                if !row.is_empty() {
                    row.push((e, -1.0));
                    lp.add(row, Cmp::Le, 0.0);
                }
            }
            next += d.arcs.len();
        }
        lp
    }

    pub fn solve(&self, tol: f64) -> Result<LayeredSolution, LpError> {
        let sol = simplex::solve(
            &self.to_program(),
            SimplexOptions {
                tolerance: tol,
                ..Default::default()
            },
        )?;
        let x = sol.values[..self.num_edges].to_vec();
        Ok(LayeredSolution {
            objective_value: x.iter().sum(),
            x,
        })
    }
}
