#![allow(dead_code)]

use dirspan::graph::DiGraph;
use proptest::prelude::*;
use proptest::sample::subsequence;

/// Graphs on `1..=max_n` vertices with integer lengths in `min_len..=max_len`.
pub fn graphs(max_n: usize, min_len: u32, max_len: u32) -> impl Strategy<Value = DiGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        (
            Just(n),
            subsequence(pairs, 0..=m),
            proptest::collection::vec(min_len..=max_len, m),
        )
            .prop_map(|(n, chosen, lens)| {
                let list: Vec<_> = chosen
                    .into_iter()
                    .zip(lens)
                    .map(|((u, v), l)| (u, v, l as f64))
                    .collect();
                DiGraph::new(n, &list).unwrap()
            })
    })
}

/// Like [`graphs`] but with at least one edge.
pub fn graphs_with_edges(max_n: usize, min_len: u32, max_len: u32) -> impl Strategy<Value = DiGraph> {
    graphs(max_n, min_len, max_len).prop_filter("needs an edge", |g| g.m() > 0)
}

/// Floyd-Warshall distances.
pub fn floyd(g: &DiGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        d[e.tail][e.head] = d[e.tail][e.head].min(e.len);
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                let via = d[u][w] + d[w][v];
                if via < d[u][v] {
                    d[u][v] = via;
                }
            }
        }
    }
    d
}

/// Edge-subset bitmasks of `g` that are k-spanners, checked over all pairs
/// with Floyd-Warshall.
pub fn spanner_masks(g: &DiGraph, k: f64) -> Vec<u32> {
    assert!(g.m() <= 20);
    let dg = floyd(g);
    (0u32..1 << g.m())
        .filter(|&mask| {
            let ids: Vec<usize> = (0..g.m()).filter(|&e| mask >> e & 1 == 1).collect();
            let dh = floyd(&g.edge_subgraph(&ids));
            (0..g.n()).all(|u| (0..g.n()).all(|v| !dg[u][v].is_finite() || dh[u][v] <= k * dg[u][v]))
        })
        .collect()
}

/// Minimum spanner size by exhaustive subset search.
pub fn opt_by_subsets(g: &DiGraph, k: f64) -> usize {
    spanner_masks(g, k).into_iter().map(|m| m.count_ones() as usize).min().unwrap()
}
