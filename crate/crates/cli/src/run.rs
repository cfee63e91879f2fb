//! Pipelines behind the subcommands.

use std::path::PathBuf;
use std::time::Instant;

use dirspan::graph::{induced_subgraph, shortest_paths, DiGraph, Direction};
use dirspan::lp::{build_lp, solve_lp, LpError, LpModel, LpSolution, FEAS_TOL};
use dirspan::paths::{covered_vertices, enumerate_demand_paths, PathCaps, PathError, DEFAULT_MAX_PATHS};
use dirspan::rounding::{build_spanner, expected_cost_report, mix64, Mode, RoundingError, RoundingParams};
use dirspan::verify::{
    brute_force_opt, check_claim1, check_claim2, is_k_spanner, is_k_spanner_all_pairs,
    ArborescenceError, ClaimError, Family, OracleError, DEFAULT_MAX_ARBORESCENCES,
    DEFAULT_MAX_FREE_EDGES,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::format::{parse_graph, ParseError};
use crate::generate::{generate_instance, random_small_spec, BadSpec, InstanceSpec};
use crate::report::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Spec(#[from] BadSpec),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("{infeasible} of {trials} trials were infeasible")]
    Infeasible { infeasible: usize, trials: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse(_) | CliError::Spec(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::Infeasible { .. } => 4,
            CliError::Numerical(_) => 5,
        }
    }
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::BadStretch(_) => CliError::Config(e.to_string()),
            _ => CliError::CapExceeded(e.to_string()),
        }
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::Paths(p) => p.into(),
            LpError::NumericalFailure(s) => CliError::Numerical(s),
            LpError::NotUnitLength(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<RoundingError> for CliError {
    fn from(e: RoundingError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::CapExceeded(e.to_string())
    }
}

impl From<ClaimError> for CliError {
    fn from(e: ClaimError) -> Self {
        match e {
            ClaimError::Paths(p) => p.into(),
            ClaimError::Arborescence(a @ ArborescenceError::ExplosionCap(_)) => {
                CliError::CapExceeded(a.to_string())
            }
            ClaimError::Arborescence(a) => CliError::Numerical(a.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Auto,
    Unit,
    General,
}

impl ModeChoice {
    /// `Auto` is unit exactly when every length is 1.
    pub fn resolve(self, g: &DiGraph) -> Result<Mode, CliError> {
        match self {
            ModeChoice::Auto if g.is_unit_length() => Ok(Mode::Unit),
            ModeChoice::Auto | ModeChoice::General => Ok(Mode::General),
            ModeChoice::Unit if g.is_unit_length() => Ok(Mode::Unit),
            ModeChoice::Unit => Err(CliError::Config("unit mode needs unit lengths".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_paths: usize,
    pub max_hops: Option<usize>,
    pub max_arborescences: usize,
    pub max_free_edges: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_paths: DEFAULT_MAX_PATHS,
            max_hops: None,
            max_arborescences: DEFAULT_MAX_ARBORESCENCES,
            max_free_edges: DEFAULT_MAX_FREE_EDGES,
        }
    }
}

impl Caps {
    pub fn paths(&self) -> PathCaps {
        PathCaps {
            max_paths: self.max_paths,
            max_hops: self.max_hops,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    File(PathBuf),
    Generator(InstanceSpec),
    Graph { graph: DiGraph, name: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: u32,
    pub mode: ModeChoice,
    pub alpha_override: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    pub caps: Caps,
    pub input: Input,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    /// Also run the exact oracle and fill the OPT ratio.
    pub oracle: bool,
    /// Include each trial's `E_H` edge ids in its record.
    pub emit_edges: bool,
}

impl RunConfig {
    pub fn new(input: Input, k: u32) -> Self {
        RunConfig {
            k,
            mode: ModeChoice::Auto,
            alpha_override: None,
            seed: 0,
            trials: 1,
            caps: Caps::default(),
            input,
            output: None,
            jobs: 1,
            oracle: false,
            emit_edges: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.k < 1 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if let Some(a) = self.alpha_override {
            if !(a > 0.0 && a.is_finite()) {
                return Err(CliError::Config(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

/// Seed of trial `index`: `mix64(seed + index)` with wrapping addition and
/// SplitMix64 finalization.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index))
}

pub fn load_graph(input: &Input) -> Result<(DiGraph, String), CliError> {
    match input {
        Input::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok((parse_graph(&text)?, path.display().to_string()))
        }
        Input::Generator(spec) => Ok((generate_instance(spec)?, spec.to_string())),
        Input::Graph { graph, name } => Ok((graph.clone(), name.clone())),
    }
}

fn summary(g: &DiGraph, source: String, k: u32, mode: Mode) -> InstanceSummary {
    InstanceSummary {
        source,
        n: g.n(),
        m: g.m(),
        k,
        unit_length: g.is_unit_length(),
        mode: mode.as_str(),
    }
}

fn lp_summary(model: &LpModel, sol: &LpSolution) -> LpSummary {
    let size = model.size();
    LpSummary {
        status: "optimal",
        value: F17(sol.objective_value),
        edge_vars: size.edge_vars,
        path_vars: size.path_vars,
        demand_rows: size.demand_rows,
        capacity_rows: size.capacity_rows,
        fixed_demands: model.blocks.iter().filter(|b| b.fixed).count(),
        iterations: sol.iterations,
    }
}

pub struct LpRun {
    pub graph: DiGraph,
    pub mode: Mode,
    pub dump: LpDump,
    pub solution: LpSolution,
    pub seconds: f64,
}

pub fn run_lp(cfg: &RunConfig) -> Result<LpRun, CliError> {
    cfg.validate()?;
    let (g, source) = load_graph(&cfg.input)?;
    let mode = cfg.mode.resolve(&g)?;
    let start = Instant::now();
    let model = build_lp(&g, cfg.k as f64, cfg.caps.paths())?;
    let sol = solve_lp(&model, FEAS_TOL)?;
    let seconds = start.elapsed().as_secs_f64();
    let dump = LpDump {
        command: "lp",
        instance: summary(&g, source, cfg.k, mode),
        lp: lp_summary(&model, &sol),
        x: f17s(&sol.x),
    };
    Ok(LpRun {
        graph: g,
        mode,
        dump,
        solution: sol,
        seconds,
    })
}

/// Runs `cfg.trials` rounding trials on LP values `x`, `cfg.jobs` at a time.
/// Records come back in trial order whatever the thread count.
pub fn run_trials(g: &DiGraph, x: &[f64], mode: Mode, cfg: &RunConfig) -> Result<Vec<TrialRecord>, CliError> {
    let one = |i: u64| -> Result<TrialRecord, CliError> {
        let seed = trial_seed(cfg.seed, i);
        let mut params = RoundingParams::new(mode, cfg.k as f64, seed);
        params.alpha = cfg.alpha_override;
        let res = build_spanner(g, x, &params)?;
        let cost = expected_cost_report(g, &res, x);
        Ok(TrialRecord {
            index: i,
            seed,
            alpha: F17(res.main_alpha()),
            roots: res.tree_roots.len(),
            rounded_edges: res.rounded_edges.len(),
            tree_edges: res.tree_edges.len(),
            e_h: res.e_h.len(),
            feasible: res.feasible,
            violation: res.violation.map(|v| v.edge),
            expected_rounded: F17(cost.expected_rounded),
            tree_bound: F17(cost.tree_bound),
            edges: cfg.emit_edges.then(|| res.e_h.clone()),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| (0..cfg.trials as u64).into_par_iter().map(one).collect())
}

fn opt_summary(g: &DiGraph, k: f64, caps: &Caps, hint: Option<&[f64]>) -> Result<OptSummary, CliError> {
    let r = brute_force_opt(g, k, caps.max_free_edges, hint)?;
    Ok(OptSummary {
        opt: r.opt,
        witness: r.witness,
        mandatory: r.mandatory,
        nodes: r.nodes,
    })
}

fn assemble(
    cfg: &RunConfig,
    command: &'static str,
    g: &DiGraph,
    instance: InstanceSummary,
    lp: LpSummary,
    x: &[f64],
    mode: Mode,
    lp_seconds: f64,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let trials = run_trials(g, x, mode, cfg)?;
    let trials_seconds = start.elapsed().as_secs_f64();
    let (oracle, oracle_seconds) = if cfg.oracle {
        let start = Instant::now();
        let o = opt_summary(g, cfg.k as f64, &cfg.caps, Some(x))?;
        (Some(o), Some(F17(start.elapsed().as_secs_f64())))
    } else {
        (None, None)
    };
    let lp_value = x.iter().sum::<f64>();
    Ok(RunReport {
        command,
        instance,
        seed: cfg.seed,
        alpha_override: cfg.alpha_override.map(F17),
        lp,
        aggregate: Aggregate::from_trials(&trials, lp_value, oracle.as_ref().map(|o| o.opt)),
        trials,
        oracle,
        timing: Timing {
            lp_seconds: F17(lp_seconds),
            trials_seconds: F17(trials_seconds),
            oracle_seconds,
        },
    })
}

/// LP once, then `trials` seeded rounding trials, each checked.
pub fn run_solve(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let lp = run_lp(cfg)?;
    assemble(
        cfg,
        "solve",
        &lp.graph,
        lp.dump.instance,
        lp.dump.lp,
        &lp.solution.x,
        lp.mode,
        lp.seconds,
    )
}

/// Rounding trials from a dump written by the `lp` command.
pub fn run_round(cfg: &RunConfig, dump_text: &str) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let (g, source) = load_graph(&cfg.input)?;
    let mode = cfg.mode.resolve(&g)?;
    let bad = |what: &str| CliError::Config(format!("LP dump: {what}"));
    let v: serde_json::Value =
        serde_json::from_str(dump_text).map_err(|e| bad(&e.to_string()))?;
    let x: Vec<f64> = v["x"]
        .as_array()
        .ok_or_else(|| bad("missing `x` array"))?
        .iter()
        .map(|e| e.as_f64().ok_or_else(|| bad("non-numeric entry in `x`")))
        .collect::<Result<_, _>>()?;
    if x.len() != g.m() {
        return Err(bad(&format!("{} values for {} edges", x.len(), g.m())));
    }
    if v["instance"]["n"].as_u64() != Some(g.n() as u64) {
        return Err(bad("vertex count differs from the input graph"));
    }
    if v["instance"]["k"].as_u64() != Some(cfg.k as u64) {
        return Err(bad("k differs from the configured k"));
    }
    let field = |name: &str| v["lp"][name].as_u64().unwrap_or(0) as usize;
    let lp = LpSummary {
        status: "loaded",
        value: F17(x.iter().sum()),
        edge_vars: field("edge_vars"),
        path_vars: field("path_vars"),
        demand_rows: field("demand_rows"),
        capacity_rows: field("capacity_rows"),
        fixed_demands: field("fixed_demands"),
        iterations: field("iterations"),
    };
    let instance = summary(&g, source, cfg.k, mode);
    assemble(cfg, "round", &g, instance, lp, &x, mode, 0.0)
}

pub fn run_verify(cfg: &RunConfig, h_edges: &[usize]) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let (g, source) = load_graph(&cfg.input)?;
    let mode = cfg.mode.resolve(&g)?;
    let k = cfg.k as f64;
    let violation = is_k_spanner(&g, h_edges, k).err().map(|v| ViolationRecord {
        edge: v.edge,
        tail: g.edge(v.edge).tail,
        head: g.edge(v.edge).head,
        dist_g: F17(v.dist_g),
        dist_h: F17(v.dist_h),
    });
    Ok(VerifyReport {
        command: "verify",
        instance: summary(&g, source, cfg.k, mode),
        subgraph_edges: h_edges.len(),
        is_spanner: violation.is_none(),
        violation,
        all_pairs: is_k_spanner_all_pairs(&g, h_edges, k),
    })
}

/// Exact OPT with witness. The LP value is attached when the LP fits the caps.
pub fn run_oracle(cfg: &RunConfig) -> Result<OracleReport, CliError> {
    cfg.validate()?;
    let (g, source) = load_graph(&cfg.input)?;
    let mode = cfg.mode.resolve(&g)?;
    let k = cfg.k as f64;
    let start = Instant::now();
    let sol = build_lp(&g, k, cfg.caps.paths())
        .and_then(|m| solve_lp(&m, FEAS_TOL))
        .ok();
    let oracle = opt_summary(&g, k, &cfg.caps, sol.as_ref().map(|s| s.x.as_slice()))?;
    Ok(OracleReport {
        command: "oracle",
        instance: summary(&g, source, cfg.k, mode),
        oracle,
        lp_value: sol.map(|s| F17(s.objective_value)),
        seconds: F17(start.elapsed().as_secs_f64()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsConfig {
    pub k: u32,
    pub seed: u64,
    /// Random instances to draw when `input` is `None`.
    pub instances: usize,
    pub max_n: usize,
    /// Random `(G', H', K)` triples per instance.
    pub triples: usize,
    /// Demands with larger `|V_uv|` are skipped by the cut-mass check.
    pub max_cover: usize,
    pub caps: Caps,
    pub input: Option<Input>,
}

impl ClaimsConfig {
    pub fn new(k: u32, seed: u64, instances: usize) -> Self {
        ClaimsConfig {
            k,
            seed,
            instances,
            max_n: 7,
            triples: 5,
            max_cover: 7,
            caps: Caps::default(),
            input: None,
        }
    }
}

fn random_subset<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let p: f64 = rng.gen();
    (0..m).filter(|_| rng.gen::<f64>() < p).collect()
}

/// A bound `K` for the path/cut check: half the time the exact `H'`
/// distance (the boundary case), otherwise a random integer.
fn random_bound<R: Rng>(rng: &mut R, g: &DiGraph, h: &[usize], u: usize, v: usize) -> f64 {
    let dh = shortest_paths(&g.edge_subgraph(h), u, Direction::Outward).dist[v];
    if dh.is_finite() && rng.gen_bool(0.5) {
        dh
    } else {
        let top = g.total_length().ceil() as u64 + 1;
        rng.gen_range(0..=top) as f64
    }
}

fn path_cut_triple<R: Rng>(
    rng: &mut R,
    g: &DiGraph,
    u: usize,
    v: usize,
    bound: Option<f64>,
    caps: &Caps,
    stats: &mut PathCutStats,
) -> Result<(), CliError> {
    let h = random_subset(rng, g.m());
    let bound = bound.unwrap_or_else(|| random_bound(rng, g, &h, u, v));
    let o = check_claim1(g, &h, u, v, bound, Family::Rooted, caps.max_arborescences)?;
    stats.triples += 1;
    stats.path_side_true += o.path_side as usize;
    stats.arborescences += o.trees;
    stats.long_arborescences += o.long_trees;
    stats.disagreements += !o.agrees() as usize;
    Ok(())
}

struct CutMassAcc {
    stats: CutMassStats,
}

impl CutMassAcc {
    fn new() -> Self {
        CutMassAcc {
            stats: CutMassStats {
                instances: 0,
                demands: 0,
                skipped_demands: 0,
                arborescences: 0,
                long_arborescences: 0,
                violations: 0,
                min_cut_mass: F17(f64::INFINITY),
                min_slack: F17(f64::INFINITY),
            },
        }
    }
}

/// Both claim checks on one instance; `tol` is the cut-mass tolerance.
fn claims_on<R: Rng>(
    rng: &mut R,
    g: &DiGraph,
    cfg: &ClaimsConfig,
    tol: f64,
    pc: &mut PathCutStats,
    cm: &mut CutMassAcc,
) -> Result<(), CliError> {
    let k = cfg.k as f64;
    for t in 0..cfg.triples {
        if g.n() < 2 {
            break;
        }
        if t % 2 == 1 && g.m() > 0 {
            // The configuration the feasibility argument uses: G' = G[V_uv]
            // and K = k * len(u, v).
            let d = rng.gen_range(0..g.m());
            let covered = covered_vertices(&enumerate_demand_paths(g, k, d, cfg.caps.paths())?)?;
            if covered.len() > cfg.max_cover {
                continue;
            }
            let sub = induced_subgraph(g, &covered);
            let e = g.edge(d);
            let (u, v) = (sub.local_vertex(e.tail).unwrap(), sub.local_vertex(e.head).unwrap());
            path_cut_triple(rng, &sub.graph, u, v, Some(k * e.len), &cfg.caps, pc)?;
        } else {
            let u = rng.gen_range(0..g.n());
            let v = (u + rng.gen_range(1..g.n())) % g.n();
            path_cut_triple(rng, g, u, v, None, &cfg.caps, pc)?;
        }
    }

    if g.m() == 0 {
        return Ok(());
    }
    let model = build_lp(g, k, cfg.caps.paths())?;
    let sol = solve_lp(&model, FEAS_TOL)?;
    let mut checked = false;
    for d in 0..g.m() {
        let dp = enumerate_demand_paths(g, k, d, cfg.caps.paths())?;
        let covered = covered_vertices(&dp)?;
        if covered.len() > cfg.max_cover {
            cm.stats.skipped_demands += 1;
            continue;
        }
        let sub = induced_subgraph(g, &covered);
        let e = g.edge(d);
        let (u, v) = (sub.local_vertex(e.tail).unwrap(), sub.local_vertex(e.head).unwrap());
        let x: Vec<f64> = sub.edge_map.iter().map(|&id| sol.x[id]).collect();
        let o = check_claim2(&x, &sub.graph, u, v, k * e.len, Family::Rooted, cfg.caps.max_arborescences)?;
        checked = true;
        cm.stats.demands += 1;
        cm.stats.arborescences += o.trees;
        cm.stats.long_arborescences += o.long_trees;
        cm.stats.violations += !o.holds(tol) as usize;
        if o.min_cut_mass < cm.stats.min_cut_mass.0 {
            cm.stats.min_cut_mass = F17(o.min_cut_mass);
            cm.stats.min_slack = F17(o.min_cut_mass - 1.0);
        }
    }
    cm.stats.instances += checked as usize;
    Ok(())
}

/// Cut-mass tolerance used by the claims batch.
pub const CUT_MASS_TOL: f64 = 1e-6;

pub fn run_claims(cfg: &ClaimsConfig) -> Result<ClaimsReport, CliError> {
    if cfg.k < 1 {
        return Err(CliError::Config("k must be at least 1".into()));
    }
    if cfg.max_n < 2 {
        return Err(CliError::Config("max-n must be at least 2".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pc = PathCutStats::default();
    let mut cm = CutMassAcc::new();
    let instances = match &cfg.input {
        Some(input) => {
            let (g, _) = load_graph(input)?;
            claims_on(&mut rng, &g, cfg, CUT_MASS_TOL, &mut pc, &mut cm)?;
            1
        }
        None => {
            for _ in 0..cfg.instances {
                let g = generate_instance(&random_small_spec(&mut rng, cfg.max_n))?;
                claims_on(&mut rng, &g, cfg, CUT_MASS_TOL, &mut pc, &mut cm)?;
            }
            cfg.instances
        }
    };
    Ok(ClaimsReport {
        command: "claims",
        seed: cfg.seed,
        instances,
        path_cut: pc,
        cut_mass: cm.stats,
        seconds: F17(start.elapsed().as_secs_f64()),
    })
}
