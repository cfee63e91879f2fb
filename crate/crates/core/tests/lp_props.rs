mod common;

use common::{floyd, graphs_with_edges, opt_by_subsets, spanner_masks};
use dirspan::graph::DiGraph;
use dirspan::lp::*;
use dirspan::paths::{enumerate_demand_walks, PathCaps};
use dirspan::simplex::{solve, Cmp, LinearProgram, SimplexError, SimplexOptions};
use dirspan::verify::{brute_force_opt, is_k_spanner, mandatory_edges, DEFAULT_MAX_FREE_EDGES};
use proptest::prelude::*;

/// Solves a square system by Gaussian elimination; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimum of a bounded LP by enumerating all basic solutions. Rows are
/// `(coeffs, cmp, rhs)` over `nv` nonnegative variables.
fn vertex_optimum(c: &[f64], rows: &[(Vec<f64>, Cmp, f64)]) -> Option<f64> {
    let nv = c.len();
    let mut all: Vec<(Vec<f64>, Cmp, f64)> = rows.to_vec();
    for i in 0..nv {
        let mut unit = vec![0.0; nv];
        unit[i] = 1.0;
        all.push((unit, Cmp::Ge, 0.0));
    }
    let feasible = |x: &[f64]| {
        all.iter().all(|(a, cmp, rhs)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            match cmp {
                Cmp::Le => lhs <= rhs + 1e-9,
                Cmp::Ge => lhs >= rhs - 1e-9,
                Cmp::Eq => (lhs - rhs).abs() <= 1e-9,
            }
        })
    };
    let mut best: Option<f64> = None;
    let total = all.len();
    let mut pick = vec![0usize; nv];
    fn rec(
        start: usize,
        depth: usize,
        total: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..total {
            pick[depth] = i;
            rec(i + 1, depth + 1, total, pick, visit);
        }
    }
    rec(0, 0, total, &mut pick, &mut |idx: &[usize]| {
        let a = idx.iter().map(|&i| all[i].0.clone()).collect();
        let b = idx.iter().map(|&i| all[i].2).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                let obj: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(obj, |v: f64| v.min(obj)));
            }
        }
    });
    best
}

fn random_lp() -> impl Strategy<Value = (Vec<f64>, Vec<(Vec<f64>, Cmp, f64)>)> {
    (1usize..=3).prop_flat_map(|nv| {
        let row = (
            proptest::collection::vec(-3i32..=3, nv),
            prop_oneof![Just(Cmp::Le), Just(Cmp::Ge), Just(Cmp::Eq)],
            -4i32..=6,
        )
            .prop_map(|(a, cmp, r)| (a.into_iter().map(f64::from).collect::<Vec<_>>(), cmp, r as f64));
        (
            proptest::collection::vec(-3i32..=3, nv).prop_map(|c| c.into_iter().map(f64::from).collect()),
            proptest::collection::vec(row, 0..=4),
        )
    })
}

fn model_value(g: &DiGraph, k: f64) -> f64 {
    solve_lp(&build_lp(g, k, PathCaps::default()).unwrap(), FEAS_TOL)
        .unwrap()
        .objective_value
}

fn stretches() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(3.0), Just(4.0), Just(5.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration((c, mut rows) in random_lp()) {
        // Box the feasible region so the optimum is a vertex.
        let nv = c.len();
        for i in 0..nv {
            let mut unit = vec![0.0; nv];
            unit[i] = 1.0;
            rows.push((unit, Cmp::Le, 5.0));
        }
        let mut lp = LinearProgram::with_vars(nv);
        lp.objective = c.clone();
        for (a, cmp, rhs) in &rows {
            lp.add(a.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect(), *cmp, *rhs);
        }
        match (solve(&lp, SimplexOptions::default()), vertex_optimum(&c, &rows)) {
            (Ok(sol), Some(best)) => {
                prop_assert!((sol.objective - best).abs() <= OBJ_TOL, "{} vs {}", sol.objective, best);
                for (a, cmp, rhs) in &rows {
                    let lhs: f64 = a.iter().zip(&sol.values).map(|(p, q)| p * q).sum();
                    match cmp {
                        Cmp::Le => prop_assert!(lhs <= rhs + 1e-7),
                        Cmp::Ge => prop_assert!(lhs >= rhs - 1e-7),
                        Cmp::Eq => prop_assert!((lhs - rhs).abs() <= 1e-7),
                    }
                }
                prop_assert!(sol.values.iter().all(|&v| v >= -1e-9));
            }
            (Err(SimplexError::Infeasible(_)), None) => {}
            (got, want) => prop_assert!(false, "simplex {:?}, vertices {:?}", got, want),
        }
    }

    #[test]
    fn lp_solution_satisfies_model(g in graphs_with_edges(7, 1, 4), k in stretches()) {
        let model = build_lp(&g, k, PathCaps::default()).unwrap();
        let sol = solve_lp(&model, FEAS_TOL).unwrap();
        prop_assert!(residuals(&model, &sol).feasible(FEAS_TOL));
        prop_assert!((sol.objective_value - sol.x.iter().sum::<f64>()).abs() <= OBJ_TOL);
        prop_assert!(sol.x.iter().all(|&v| v >= -FEAS_TOL));
        // One-shot simplex over every path reaches the same optimum.
        if model.size().path_vars <= 400 {
            let direct = solve_lp_direct(&model, FEAS_TOL).unwrap();
            prop_assert!((direct.objective_value - sol.objective_value).abs() <= OBJ_TOL);
        }
        // Presolve only removes rows; the optimum is unchanged.
        let plain = solve_lp(&build_lp_with(&g, k, PathCaps::default(), false).unwrap(), FEAS_TOL).unwrap();
        prop_assert!((plain.objective_value - sol.objective_value).abs() <= OBJ_TOL);
        // Mandatory edges carry x = 1 in any feasible point.
        for e in mandatory_edges(&g, k) {
            prop_assert!(sol.x[e] >= 1.0 - FEAS_TOL);
        }
    }

    #[test]
    fn path_and_layered_optima_agree(g in graphs_with_edges(7, 1, 1), k in prop_oneof![Just(1.0), Just(2.0), Just(3.0)]) {
        let path = model_value(&g, k);
        let layered = build_layered_lp_unit(&g, k).unwrap().solve(FEAS_TOL).unwrap();
        prop_assert!((path - layered.objective_value).abs() <= 1e-6, "{} vs {}", path, layered.objective_value);
    }

    #[test]
    fn simple_paths_and_walks_give_same_optimum(g in graphs_with_edges(6, 1, 3), k in stretches()) {
        let d = floyd(&g);
        let longest = d.iter().flatten().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
        // Lengths are >= 1, so no walk within budget has more hops than this.
        let caps = PathCaps { max_paths: 1_000_000, max_hops: Some((k * longest) as usize + 1) };
        let families = (0..g.m()).map(|e| enumerate_demand_walks(&g, k, e, caps).unwrap()).collect();
        let walks = solve_lp(&LpModel::from_families(&g, families, true).unwrap(), FEAS_TOL).unwrap();
        prop_assert!((walks.objective_value - model_value(&g, k)).abs() <= OBJ_TOL);
    }

    #[test]
    fn adding_a_long_edge_costs_at_most_one(g in graphs_with_edges(6, 1, 4), k in stretches(), pick in any::<usize>()) {
        let missing: Vec<(usize, usize)> = (0..g.n())
            .flat_map(|u| (0..g.n()).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && g.find_edge(u, v).is_none())
            .collect();
        prop_assume!(!missing.is_empty());
        let (a, b) = missing[pick % missing.len()];
        // Too long for any existing demand's budget, so old path sets are unchanged.
        let mut list = g.edge_list();
        list.push((a, b, k * g.total_length() + 1.0));
        let bigger = DiGraph::new(g.n(), &list).unwrap();
        let (before, after) = (model_value(&g, k), model_value(&bigger, k));
        prop_assert!(after >= before - OBJ_TOL);
        prop_assert!(after <= before + 1.0 + OBJ_TOL);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn lp_bounds_opt_and_branch_and_bound_is_exact(
        g in graphs_with_edges(6, 1, 4).prop_filter("small", |g| g.m() <= 11),
        k in stretches(),
    ) {
        let opt = opt_by_subsets(&g, k);
        let lp = solve_lp(&build_lp(&g, k, PathCaps::default()).unwrap(), FEAS_TOL).unwrap();
        prop_assert!(lp.objective_value <= opt as f64 + OBJ_TOL);
        prop_assert!(lp_lower_bound_check(&lp, opt, OBJ_TOL));

        let bb = brute_force_opt(&g, k, DEFAULT_MAX_FREE_EDGES, None).unwrap();
        let hinted = brute_force_opt(&g, k, DEFAULT_MAX_FREE_EDGES, Some(&lp.x)).unwrap();
        prop_assert_eq!(bb.opt, opt);
        prop_assert_eq!(hinted.opt, opt);
        prop_assert!(is_k_spanner(&g, &bb.witness, k).is_ok());
        prop_assert_eq!(bb.witness.len(), opt);
        // Every minimum spanner contains the mandatory edges.
        for mask in spanner_masks(&g, k).into_iter().filter(|m| m.count_ones() as usize == opt) {
            prop_assert!(bb.mandatory.iter().all(|&e| mask >> e & 1 == 1));
        }
    }
}
