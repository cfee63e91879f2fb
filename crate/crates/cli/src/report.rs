//! JSON report documents.
//!
//! Every float is written with 17 significant digits (`d.dddddddddddddddde±x`),
//! which round-trips an `f64` exactly. Non-finite values are written as `null`.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// An `f64` serialized with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl From<f64> for F17 {
    fn from(x: f64) -> Self {
        F17(x)
    }
}

pub fn f17s(xs: &[f64]) -> Vec<F17> {
    xs.iter().copied().map(F17).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub unit_length: bool,
    pub mode: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpSummary {
    pub status: &'static str,
    pub value: F17,
    pub edge_vars: usize,
    pub path_vars: usize,
    pub demand_rows: usize,
    pub capacity_rows: usize,
    pub fixed_demands: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub alpha: F17,
    pub roots: usize,
    pub rounded_edges: usize,
    pub tree_edges: usize,
    pub e_h: usize,
    pub feasible: bool,
    /// Lowest-id violated demand edge when infeasible.
    pub violation: Option<usize>,
    /// Sum of clamped inclusion probabilities.
    pub expected_rounded: F17,
    /// `2 |S| (n - 1)` over components.
    pub tree_bound: F17,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub trials: usize,
    pub feasible_trials: usize,
    pub feasible_fraction: F17,
    pub mean_e_h: F17,
    pub max_e_h: usize,
    pub mean_rounded_edges: F17,
    pub mean_tree_edges: F17,
    /// `mean_e_h / lp_value`.
    pub ratio_lp: F17,
    pub opt: Option<usize>,
    /// `mean_e_h / opt`.
    pub ratio_opt: Option<F17>,
}

impl Aggregate {
    /// Recomputes every field from the per-trial records.
    pub fn from_trials(trials: &[TrialRecord], lp_value: f64, opt: Option<usize>) -> Self {
        let t = trials.len();
        let feasible = trials.iter().filter(|r| r.feasible).count();
        let mean = |f: fn(&TrialRecord) -> usize| {
            trials.iter().map(|r| f(r) as f64).sum::<f64>() / t as f64
        };
        let mean_e_h = mean(|r| r.e_h);
        Aggregate {
            trials: t,
            feasible_trials: feasible,
            feasible_fraction: F17(feasible as f64 / t as f64),
            mean_e_h: F17(mean_e_h),
            max_e_h: trials.iter().map(|r| r.e_h).max().unwrap_or(0),
            mean_rounded_edges: F17(mean(|r| r.rounded_edges)),
            mean_tree_edges: F17(mean(|r| r.tree_edges)),
            ratio_lp: F17(mean_e_h / lp_value),
            opt,
            ratio_opt: opt.map(|o| F17(mean_e_h / o as f64)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptSummary {
    pub opt: usize,
    pub witness: Vec<usize>,
    pub mandatory: Vec<usize>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub lp_seconds: F17,
    pub trials_seconds: F17,
    pub oracle_seconds: Option<F17>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub instance: InstanceSummary,
    pub seed: u64,
    pub alpha_override: Option<F17>,
    pub lp: LpSummary,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OptSummary>,
    pub timing: Timing,
}

/// Output of the `lp` command; `round` reads it back.
#[derive(Debug, Clone, Serialize)]
pub struct LpDump {
    pub command: &'static str,
    pub instance: InstanceSummary,
    pub lp: LpSummary,
    pub x: Vec<F17>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub instance: InstanceSummary,
    pub subgraph_edges: usize,
    pub is_spanner: bool,
    pub violation: Option<ViolationRecord>,
    pub all_pairs: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub dist_g: F17,
    pub dist_h: F17,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub command: &'static str,
    pub instance: InstanceSummary,
    pub oracle: OptSummary,
    pub lp_value: Option<F17>,
    pub seconds: F17,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PathCutStats {
    pub triples: usize,
    pub path_side_true: usize,
    pub arborescences: usize,
    pub long_arborescences: usize,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutMassStats {
    pub instances: usize,
    pub demands: usize,
    pub skipped_demands: usize,
    pub arborescences: usize,
    pub long_arborescences: usize,
    pub violations: usize,
    /// Smallest cut mass over all long arborescences (`null` if none).
    pub min_cut_mass: F17,
    /// `min_cut_mass - 1`.
    pub min_slack: F17,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimsReport {
    pub command: &'static str,
    pub seed: u64,
    pub instances: usize,
    pub path_cut: PathCutStats,
    pub cut_mass: CutMassStats,
    pub seconds: F17,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
