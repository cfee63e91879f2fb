use dirspan::graph::DiGraph;
use dirspan_cli::format::{parse_graph, parse_subgraph, serialize_graph};
use dirspan_cli::generate::{generate_instance, random_small_spec, InstanceSpec};
use dirspan_cli::report::to_json;
use dirspan_cli::run::{run_solve, trial_seed, Input, RunConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(seed: u64, max_n: usize) -> InstanceSpec {
    random_small_spec(&mut ChaCha8Rng::seed_from_u64(seed), max_n)
}

fn arbitrary_graph() -> impl Strategy<Value = DiGraph> {
    (1usize..8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        (
            Just(n),
            proptest::sample::subsequence(pairs, 0..=m),
            proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..1e6, 1e-300f64..1e-290], m),
        )
            .prop_map(|(n, chosen, lens)| {
                let list: Vec<_> = chosen.into_iter().zip(lens).map(|((u, v), l)| (u, v, l)).collect();
                DiGraph::new(n, &list).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(g in arbitrary_graph()) {
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>()) {
        let s = spec(seed, 12);
        let g = generate_instance(&s).unwrap();
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g.clone());
        // The spec string regenerates the same graph.
        let again: InstanceSpec = s.to_string().parse().unwrap();
        prop_assert_eq!(generate_instance(&again).unwrap(), g);
    }

    #[test]
    fn subgraph_ids_follow_edge_order(g in arbitrary_graph(), mask in any::<u64>()) {
        let mut text = String::new();
        let mut want = Vec::new();
        for (i, e) in g.edges().iter().enumerate().rev() {
            if mask >> (i % 64) & 1 == 1 {
                text.push_str(&format!("{} {} {:?}\n", e.tail, e.head, e.len));
                want.push(i);
            }
        }
        want.sort_unstable();
        let header = format!("{} {}\n", g.n(), want.len());
        prop_assert_eq!(parse_subgraph(&g, &(header + &text)).unwrap(), want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn aggregates_recompute_from_trials(seed in any::<u64>(), run_seed in any::<u64>(), k in 1u32..4) {
        let g = generate_instance(&spec(seed, 8)).unwrap();
        prop_assume!(g.m() > 0);
        let mut cfg = RunConfig::new(Input::Graph { graph: g.clone(), name: "g".into() }, k);
        cfg.seed = run_seed;
        cfg.trials = 12;
        cfg.alpha_override = Some(0.3);
        let r = run_solve(&cfg).unwrap();
        let t = r.trials.len() as f64;
        prop_assert_eq!(r.trials.len(), 12);
        for (i, tr) in r.trials.iter().enumerate() {
            prop_assert_eq!(tr.index, i as u64);
            prop_assert_eq!(tr.seed, trial_seed(run_seed, i as u64));
            prop_assert!(tr.e_h <= tr.rounded_edges + tr.tree_edges);
            prop_assert!(tr.e_h >= tr.rounded_edges.max(tr.tree_edges));
            prop_assert!(tr.tree_edges as f64 <= tr.tree_bound.0);
            prop_assert_eq!(tr.feasible, tr.violation.is_none());
        }
        let a = &r.aggregate;
        let sum = |f: &dyn Fn(&dirspan_cli::report::TrialRecord) -> usize| r.trials.iter().map(|x| f(x) as f64).sum::<f64>();
        prop_assert_eq!(a.trials, 12);
        prop_assert_eq!(a.feasible_trials, r.trials.iter().filter(|x| x.feasible).count());
        prop_assert_eq!(a.mean_e_h.0, sum(&|x| x.e_h) / t);
        prop_assert_eq!(a.mean_rounded_edges.0, sum(&|x| x.rounded_edges) / t);
        prop_assert_eq!(a.mean_tree_edges.0, sum(&|x| x.tree_edges) / t);
        prop_assert_eq!(a.max_e_h, r.trials.iter().map(|x| x.e_h).max().unwrap());
        prop_assert_eq!(a.ratio_lp.0, a.mean_e_h.0 / r.lp.value.0);

        // Thread count never changes the records.
        cfg.jobs = 3;
        let par = run_solve(&cfg).unwrap();
        prop_assert_eq!(&par.trials, &r.trials);

        // Every float in the JSON report reads back to the same value.
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        prop_assert_eq!(v["lp"]["value"].as_f64().unwrap(), r.lp.value.0);
        prop_assert_eq!(v["aggregate"]["mean_e_h"].as_f64().unwrap(), a.mean_e_h.0);
    }
}
