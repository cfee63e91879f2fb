use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirspan_cli::format::{parse_subgraph, serialize_graph};
use dirspan_cli::generate::{generate_instance, InstanceSpec};
use dirspan_cli::report::to_json;
use dirspan_cli::run::*;

#[derive(Parser)]
#[command(name = "dirspan", version, about = "Directed k-spanner LP rounding and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the LP, run rounding trials and check every result.
    Solve(SolveArgs),
    /// Solve the LP only and write its values.
    Lp {
        #[command(flatten)]
        common: Common,
        /// Also export the model in CPLEX LP format.
        #[arg(long)]
        lp_format: Option<PathBuf>,
    },
    /// Run rounding trials from an `lp` dump.
    Round {
        #[command(flatten)]
        trials: SolveArgs,
        #[arg(long)]
        lp_dump: PathBuf,
    },
    /// Check a given subgraph H (edge-list file over the same vertices).
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        subgraph: PathBuf,
    },
    /// Exact minimum spanner by branch-and-bound.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Batch check of the path/cut equivalence and the LP cut-mass bound.
    Claims(ClaimsArgs),
    /// Write a generated instance in edge-list format.
    Gen {
        spec: InstanceSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CapArgs {
    #[arg(long, env = "DIRSPAN_MAX_PATHS", default_value_t = Caps::default().max_paths)]
    max_paths: usize,
    #[arg(long, env = "DIRSPAN_MAX_HOPS")]
    max_hops: Option<usize>,
    #[arg(long, env = "DIRSPAN_MAX_ARBORESCENCES", default_value_t = Caps::default().max_arborescences)]
    max_arborescences: usize,
    #[arg(long, env = "DIRSPAN_MAX_FREE_EDGES", default_value_t = Caps::default().max_free_edges)]
    max_free_edges: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            max_paths: self.max_paths,
            max_hops: self.max_hops,
            max_arborescences: self.max_arborescences,
            max_free_edges: self.max_free_edges,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Unit,
    General,
}

#[derive(Args)]
struct Common {
    /// Graph file in edge-list format.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. `er:n=20,p=0.2,maxlen=4,seed=7`.
    #[arg(long)]
    gen: Option<InstanceSpec>,
    /// Stretch factor.
    #[arg(short, long)]
    k: u32,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[command(flatten)]
    caps: CapArgs,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        let input = match (&self.input, &self.gen) {
            (Some(p), _) => Input::File(p.clone()),
            (None, Some(s)) => Input::Generator(*s),
            (None, None) => unreachable!("clap requires one input"),
        };
        let mut cfg = RunConfig::new(input, self.k);
        cfg.mode = match self.mode {
            ModeArg::Auto => ModeChoice::Auto,
            ModeArg::Unit => ModeChoice::Unit,
            ModeArg::General => ModeChoice::General,
        };
        cfg.caps = self.caps.caps();
        cfg.output = self.out.clone();
        cfg
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Use this alpha for every component instead of the default for the mode.
    #[arg(long)]
    alpha: Option<f64>,
    /// Worker threads for trials.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also compute OPT exactly and report the ratio.
    #[arg(long)]
    oracle: bool,
    /// Include every trial's edge set in the report.
    #[arg(long)]
    emit_edges: bool,
    /// Exit with status 4 unless every trial is feasible.
    #[arg(long)]
    require_feasible: bool,
}

impl SolveArgs {
    fn config(&self) -> RunConfig {
        let mut cfg = self.common.config();
        cfg.seed = self.seed;
        cfg.trials = self.trials;
        cfg.alpha_override = self.alpha;
        cfg.jobs = self.jobs;
        cfg.oracle = self.oracle;
        cfg.emit_edges = self.emit_edges;
        cfg
    }
}

#[derive(Args)]
struct ClaimsArgs {
    #[arg(short, long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    /// Path/cut triples per instance.
    #[arg(long, default_value_t = 5)]
    triples: usize,
    /// Skip cut-mass checks on demands covering more vertices.
    #[arg(long, default_value_t = 7)]
    max_cover: usize,
    /// Check a single graph file instead of random instances.
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    #[arg(long)]
    gen: Option<InstanceSpec>,
    #[command(flatten)]
    caps: CapArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn finish_trials(report: &dirspan_cli::report::RunReport, args: &SolveArgs) -> Result<(), CliError> {
    emit(&args.common.out, &to_json(report))?;
    let a = &report.aggregate;
    eprintln!(
        "{}: n={} m={} k={} lp={:.6} trials={} feasible={}/{} mean|E_H|={:.3} max|E_H|={}{}",
        report.command,
        report.instance.n,
        report.instance.m,
        report.instance.k,
        report.lp.value.0,
        a.trials,
        a.feasible_trials,
        a.trials,
        a.mean_e_h.0,
        a.max_e_h,
        a.opt.map_or(String::new(), |o| format!(" opt={o}")),
    );
    if args.require_feasible && a.feasible_trials < a.trials {
        return Err(CliError::Infeasible {
            infeasible: a.trials - a.feasible_trials,
            trials: a.trials,
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let report = run_solve(&args.config())?;
            finish_trials(&report, &args)
        }
        Command::Round { trials, lp_dump } => {
            let report = run_round(&trials.config(), &read(&lp_dump)?)?;
            finish_trials(&report, &trials)
        }
        Command::Lp { common, lp_format } => {
            let cfg = common.config();
            let lp = run_lp(&cfg)?;
            if let Some(path) = lp_format {
                let model = dirspan::lp::build_lp(&lp.graph, cfg.k as f64, cfg.caps.paths())?;
                emit(&Some(path), &model.to_lp_format())?;
            }
            emit(&common.out, &to_json(&lp.dump))?;
            eprintln!(
                "lp: n={} m={} k={} value={:.9} paths={} iterations={}",
                lp.dump.instance.n,
                lp.dump.instance.m,
                cfg.k,
                lp.dump.lp.value.0,
                lp.dump.lp.path_vars,
                lp.dump.lp.iterations
            );
            Ok(())
        }
        Command::Verify { common, subgraph } => {
            let cfg = common.config();
            let (g, _) = load_graph(&cfg.input)?;
            let h = parse_subgraph(&g, &read(&subgraph)?)?;
            let report = run_verify(&cfg, &h)?;
            emit(&common.out, &to_json(&report))?;
            match &report.violation {
                None => eprintln!("verify: H ({} edges) is a {}-spanner", h.len(), cfg.k),
                Some(v) => eprintln!(
                    "verify: edge {} ({} -> {}) has dist_H = {} > {} * {}",
                    v.edge, v.tail, v.head, v.dist_h.0, cfg.k, v.dist_g.0
                ),
            }
            Ok(())
        }
        Command::Oracle { common } => {
            let report = run_oracle(&common.config())?;
            emit(&common.out, &to_json(&report))?;
            eprintln!(
                "oracle: opt={} mandatory={} nodes={}",
                report.oracle.opt,
                report.oracle.mandatory.len(),
                report.oracle.nodes
            );
            Ok(())
        }
        Command::Claims(a) => {
            let mut cfg = ClaimsConfig::new(a.k, a.seed, a.instances);
            cfg.max_n = a.max_n;
            cfg.triples = a.triples;
            cfg.max_cover = a.max_cover;
            cfg.caps = a.caps.caps();
            cfg.input = match (a.input, a.gen) {
                (Some(p), _) => Some(Input::File(p)),
                (None, Some(s)) => Some(Input::Generator(s)),
                (None, None) => None,
            };
            let report = run_claims(&cfg)?;
            emit(&a.out, &to_json(&report))?;
            eprintln!(
                "claims: {} instances, {} path/cut triples ({} disagreements), {} cut-mass demands ({} violations, min mass {})",
                report.instances,
                report.path_cut.triples,
                report.path_cut.disagreements,
                report.cut_mass.demands,
                report.cut_mass.violations,
                report.cut_mass.min_cut_mass.0
            );
            if report.path_cut.disagreements + report.cut_mass.violations > 0 {
                return Err(CliError::Numerical("claim violations found".into()));
            }
            Ok(())
        }
        Command::Gen { spec, out } => {
            let g = generate_instance(&spec)?;
            emit(&out, &format!("# {spec}\n{}", serialize_graph(&g)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
