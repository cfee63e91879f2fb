//! Directed k-spanners: an LP relaxation over stretch-bounded paths,
//! randomized rounding with shortest-path-tree sampling, and exact oracles
//! for checking the pieces on small instances.
//!
//! ```
//! use dirspan::graph::DiGraph;
//! use dirspan::lp::{build_lp, solve_lp, FEAS_TOL};
//! use dirspan::paths::PathCaps;
//! use dirspan::rounding::{build_spanner, Mode, RoundingParams};
//!
//! let g = DiGraph::new(3, &[(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)]).unwrap();
//! let model = build_lp(&g, 3.0, PathCaps::default()).unwrap();
//! let lp = solve_lp(&model, FEAS_TOL).unwrap();
//! assert!((lp.objective_value - 2.0).abs() < 1e-7);
//! let h = build_spanner(&g, &lp.x, &RoundingParams::new(Mode::Unit, 3.0, 42)).unwrap();
//! assert!(h.feasible);
//! ```

pub mod graph;
pub mod lp;
pub mod paths;
pub mod rounding;
pub mod simplex;
pub mod verify;
