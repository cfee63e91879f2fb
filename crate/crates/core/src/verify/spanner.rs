use crate::graph::{distance_matrix, shortest_paths, DiGraph, Direction};

/// A demand edge whose stretch bound fails in `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpannerViolation {
    pub edge: usize,
    pub dist_g: f64,
    pub dist_h: f64,
}

/// Subgraph of `g` on the listed edge ids (duplicates ignored), edges
/// renumbered in sorted id order.
pub(crate) fn sub_on(g: &DiGraph, h_edges: &[usize]) -> (DiGraph, Vec<usize>) {
    let mut ids = h_edges.to_vec();
    ids.sort_unstable();
    ids.dedup();
    assert!(ids.last().map_or(true, |&e| e < g.m()), "edge id out of range");
    (g.edge_subgraph(&ids), ids)
}

/// Checks `dist_H(u, v) <= k * dist_G(u, v)` for every edge `(u, v)` of `g`.
/// On failure reports the lowest-id violating edge.
pub fn is_k_spanner(g: &DiGraph, h_edges: &[usize], k: f64) -> Result<(), SpannerViolation> {
    let (h, _) = sub_on(g, h_edges);
    let mut first: Option<SpannerViolation> = None;
    for u in 0..g.n() {
        let outs = g.out_edges(u);
        if outs.is_empty() {
            continue;
        }
        let dg = shortest_paths(g, u, Direction::Outward).dist;
        let dh = shortest_paths(&h, u, Direction::Outward).dist;
        for &e in outs {
            let v = g.edge(e).head;
            if !(dh[v] <= k * dg[v]) && first.map_or(true, |f| e < f.edge) {
                first = Some(SpannerViolation {
                    edge: e,
                    dist_g: dg[v],
                    dist_h: dh[v],
                });
            }
        }
    }
    first.map_or(Ok(()), Err)
}

/// The stretch bound over every ordered vertex pair with finite `dist_G`.
pub fn is_k_spanner_all_pairs(g: &DiGraph, h_edges: &[usize], k: f64) -> bool {
    let (h, _) = sub_on(g, h_edges);
    let dg = distance_matrix(g);
    let dh = distance_matrix(&h);
    dg.iter().zip(&dh).all(|(rg, rh)| {
        rg.iter()
            .zip(rh)
            .all(|(&a, &b)| !a.is_finite() || b <= k * a)
    })
}

/// Whether the per-edge check and the all-pairs check agree on `h_edges`.
pub fn edge_check_equals_allpairs_check(g: &DiGraph, h_edges: &[usize], k: f64) -> bool {
    is_k_spanner(g, h_edges, k).is_ok() == is_k_spanner_all_pairs(g, h_edges, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> DiGraph {
        let list: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        DiGraph::new(n, &list).unwrap()
    }

    #[test]
    fn identity_is_spanner() {
        let g = cycle(5);
        let all: Vec<usize> = (0..5).collect();
        assert_eq!(is_k_spanner(&g, &all, 1.0), Ok(()));
        assert!(edge_check_equals_allpairs_check(&g, &all, 1.0));
    }

    #[test]
    fn cycle_missing_edge() {
        let g = cycle(6);
        let h = [0, 1, 3, 4, 5];
        let v = is_k_spanner(&g, &h, 3.0).unwrap_err();
        assert_eq!(v.edge, 2);
        assert_eq!(v.dist_g, 1.0);
        assert_eq!(v.dist_h, f64::INFINITY);
        assert!(!is_k_spanner_all_pairs(&g, &h, 3.0));
    }

    #[test]
    fn triangle_detour() {
        let g = DiGraph::new(3, &[(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert!(is_k_spanner(&g, &[1, 2], 3.0).is_ok());
        assert!(is_k_spanner(&g, &[1, 2], 1.5).is_err());
    }

    #[test]
    fn empty_subgraph_fails_both() {
        let g = cycle(4);
        assert!(is_k_spanner(&g, &[], 10.0).is_err());
        assert!(!is_k_spanner_all_pairs(&g, &[], 10.0));
        assert!(edge_check_equals_allpairs_check(&g, &[], 10.0));
    }
}
