//! Ground-truth checkers: spanner feasibility, exact optimum, rooted
//! arborescences and the path/cut statements used in the analysis.

pub mod arborescence;
pub mod claims;
pub mod opt;
mod spanner;

pub use arborescence::{
    enumerate_arborescences, shortest_path_arborescence, Arborescence, ArborescenceError,
    Family, DEFAULT_MAX_ARBORESCENCES,
};
pub use claims::{
    check_claim1, check_claim2, check_claim2_for_demand, ClaimError, CutMassOutcome,
    PathCutOutcome,
};
pub use opt::{brute_force_opt, mandatory_edges, OptResult, OracleError, DEFAULT_MAX_FREE_EDGES};
pub use spanner::{
    edge_check_equals_allpairs_check, is_k_spanner, is_k_spanner_all_pairs, SpannerViolation,
};
