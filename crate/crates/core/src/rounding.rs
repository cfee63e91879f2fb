//! Randomized spanner construction from a fractional LP solution.
//!
//! Each edge is kept independently with probability `min(alpha * x_e * sqrt(n), 1)`;
//! each vertex becomes a tree root independently with probability
//! `min(alpha / sqrt(n), 1)`, and both its outward and inward shortest-path
//! trees are added. The construction runs separately on every weakly
//! connected component, with `n` the size of that component.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{induced_subgraph, shortest_path_tree, DiGraph, Direction};
use crate::verify::{is_k_spanner, SpannerViolation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("unit mode needs unit lengths (edge {0} is not)")]
    NotUnitLength(usize),
    #[error("LP vector has {got} entries for {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("LP value {value} on edge {edge} is negative or not a number")]
    BadLpValue { edge: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Unit lengths: `alpha = 10 sqrt(k) ln n`.
    Unit,
    /// Arbitrary lengths: `alpha = 5 ln n`.
    General,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Unit => "unit",
            Mode::General => "general",
        }
    }
}

/// `n` is a vertex count; it is taken as a real so the formula can be
/// evaluated anywhere.
pub fn select_alpha(mode: Mode, n: f64, k: f64) -> f64 {
    let ln_n = n.ln();
    match mode {
        Mode::Unit => 10.0 * k.sqrt() * ln_n,
        Mode::General => 5.0 * ln_n,
    }
}

/// 64-bit finalizer from SplitMix64.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sub-stream `label` / `index` of a master seed.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label.
    let tag = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    mix64(mix64(master ^ tag).wrapping_add(index))
}

pub fn stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, index))
}

/// Per-edge inclusion probability used by [`round_edges`].
pub fn inclusion_probability(x: f64, alpha: f64, n: usize) -> f64 {
    (alpha * x * (n as f64).sqrt()).min(1.0)
}

pub fn root_probability(alpha: f64, n: usize) -> f64 {
    (alpha / (n as f64).sqrt()).min(1.0)
}

/// Independent edge rounding on `g`. One uniform draw per edge, in id order.
pub fn round_edges<R: Rng>(g: &DiGraph, x: &[f64], alpha: f64, rng: &mut R) -> Vec<usize> {
    assert_eq!(x.len(), g.m());
    x.iter()
        .enumerate()
        .filter_map(|(e, &xe)| {
            let p = inclusion_probability(xe, alpha, g.n());
            (rng.gen::<f64>() < p).then_some(e)
        })
        .collect()
}

/// Independent root sampling over `0..n`. One uniform draw per vertex.
pub fn sample_tree_roots<R: Rng>(n: usize, alpha: f64, rng: &mut R) -> Vec<usize> {
    let p = root_probability(alpha, n);
    (0..n).filter(|_| rng.gen::<f64>() < p).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingParams {
    pub mode: Mode,
    pub k: f64,
    pub seed: u64,
    /// Fixed alpha for every component instead of [`select_alpha`].
    pub alpha: Option<f64>,
    /// Replaces the sampled root set (vertex ids of the whole graph).
    pub force_roots: Option<Vec<usize>>,
    /// Replaces the rounded edge set (edge ids of the whole graph).
    pub force_rounded: Option<Vec<usize>>,
}

impl RoundingParams {
    pub fn new(mode: Mode, k: f64, seed: u64) -> Self {
        RoundingParams {
            mode,
            k,
            seed,
            alpha: None,
            force_roots: None,
            force_rounded: None,
        }
    }
}

/// What one component contributed; `probabilities` is indexed like `edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRun {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub alpha: f64,
    pub probabilities: Vec<f64>,
    pub root_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpannerResult {
    pub rounded_edges: Vec<usize>,
    pub tree_roots: Vec<usize>,
    pub tree_edges: Vec<usize>,
    pub e_h: Vec<usize>,
    pub feasible: bool,
    pub violation: Option<SpannerViolation>,
    pub components: Vec<ComponentRun>,
    pub lp_value: f64,
    pub seed: u64,
}

impl SpannerResult {
    /// Alpha of the largest component (ties: the first), or 0 for edgeless graphs.
    pub fn main_alpha(&self) -> f64 {
        self.components
            .iter()
            .rev()
            .max_by_key(|c| c.vertices.len())
            .map_or(0.0, |c| c.alpha)
    }

    /// Per-edge inclusion probability, indexed by edge id of the whole graph.
    pub fn edge_probabilities(&self, m: usize) -> Vec<f64> {
        let mut p = vec![0.0; m];
        for c in &self.components {
            for (&e, &q) in c.edges.iter().zip(&c.probabilities) {
                p[e] = q;
            }
        }
        p
    }
}

/// Runs the three-step construction on every component and checks the
/// result with [`is_k_spanner`].
pub fn build_spanner(
    g: &DiGraph,
    x: &[f64],
    params: &RoundingParams,
) -> Result<SpannerResult, RoundingError> {
    if x.len() != g.m() {
        return Err(RoundingError::LengthMismatch {
            expected: g.m(),
            got: x.len(),
        });
    }
    if let Some((edge, &value)) = x.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(RoundingError::BadLpValue { edge, value });
    }
    if let Some(a) = params.alpha {
        if !(a > 0.0 && a.is_finite()) {
            return Err(RoundingError::BadAlpha(a));
        }
    }
    if params.mode == Mode::Unit {
        if let Some(e) = g.edges().iter().position(|e| e.len != 1.0) {
            return Err(RoundingError::NotUnitLength(e));
        }
    }

    let mut rounded = BTreeSet::new();
    let mut roots = BTreeSet::new();
    let mut tree = BTreeSet::new();
    let mut components = Vec::new();
    for (ci, comp) in g.weak_components().into_iter().enumerate() {
        if comp.len() < 2 {
            continue;
        }
        let sub = induced_subgraph(g, &comp);
        let n = comp.len();
        let alpha = params
            .alpha
            .unwrap_or_else(|| select_alpha(params.mode, n as f64, params.k));
        let local_x: Vec<f64> = sub.edge_map.iter().map(|&e| x[e]).collect();

        match &params.force_rounded {
            Some(forced) => rounded.extend(forced.iter().filter(|e| sub.edge_map.contains(e))),
            None => {
                let mut rng = stream(params.seed, "edges", ci as u64);
                let picked = round_edges(&sub.graph, &local_x, alpha, &mut rng);
                rounded.extend(picked.into_iter().map(|e| sub.edge_map[e]));
            }
        }
        let local_roots: Vec<usize> = match &params.force_roots {
            Some(forced) => forced.iter().filter_map(|&v| sub.local_vertex(v)).collect(),
            None => {
                let mut rng = stream(params.seed, "roots", ci as u64);
                sample_tree_roots(n, alpha, &mut rng)
            }
        };
        for &r in &local_roots {
            roots.insert(sub.vertex_map[r]);
            for dir in [Direction::Outward, Direction::Inward] {
                let t = shortest_path_tree(&sub.graph, r, dir);
                tree.extend(t.tree_edges.into_iter().map(|e| sub.edge_map[e]));
            }
        }
        components.push(ComponentRun {
            probabilities: local_x
                .iter()
                .map(|&xe| inclusion_probability(xe, alpha, n))
                .collect(),
            root_probability: root_probability(alpha, n),
            vertices: comp,
            edges: sub.edge_map,
            alpha,
        });
    }

    let e_h: Vec<usize> = rounded.union(&tree).copied().collect();
    let violation = is_k_spanner(g, &e_h, params.k).err();
    Ok(SpannerResult {
        rounded_edges: rounded.into_iter().collect(),
        tree_roots: roots.into_iter().collect(),
        tree_edges: tree.into_iter().collect(),
        feasible: violation.is_none(),
        violation,
        e_h,
        components,
        lp_value: x.iter().sum(),
        seed: params.seed,
    })
}

/// Observed sizes next to the quantities the analysis predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub rounded_edges: usize,
    pub tree_edges: usize,
    pub total_edges: usize,
    pub roots: usize,
    /// Exact expectation of `rounded_edges`: sum of clamped probabilities.
    pub expected_rounded: f64,
    /// Unclamped `alpha sqrt(n) sum x_e`, summed over components.
    pub rounded_bound: f64,
    /// `2 E|S| (n - 1)` summed over components.
    pub expected_tree_bound: f64,
    /// `2 |S| (n - 1)` for the sampled roots; never exceeded.
    pub tree_bound: f64,
}

pub fn expected_cost_report(g: &DiGraph, result: &SpannerResult, x: &[f64]) -> CostReport {
    let mut rep = CostReport {
        rounded_edges: result.rounded_edges.len(),
        tree_edges: result.tree_edges.len(),
        total_edges: result.e_h.len(),
        roots: result.tree_roots.len(),
        expected_rounded: 0.0,
        rounded_bound: 0.0,
        expected_tree_bound: 0.0,
        tree_bound: 0.0,
    };
    let mut comp_of = vec![usize::MAX; g.n()];
    for (ci, c) in result.components.iter().enumerate() {
        let n = c.vertices.len() as f64;
        rep.expected_rounded += c.probabilities.iter().sum::<f64>();
        rep.rounded_bound += c.alpha * n.sqrt() * c.edges.iter().map(|&e| x[e]).sum::<f64>();
        rep.expected_tree_bound += 2.0 * n * c.root_probability * (n - 1.0);
        for &v in &c.vertices {
            comp_of[v] = ci;
        }
    }
    for &r in &result.tree_roots {
        let n = result.components[comp_of[r]].vertices.len() as f64;
        rep.tree_bound += 2.0 * (n - 1.0);
    }
    rep
}
