//! Directed graphs with nonnegative edge lengths, single-source shortest
//! paths, shortest-path trees and induced subgraphs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("edge {edge}: vertex {vertex} out of range for {n} vertices")]
    IndexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge}: length {length} is negative or not a number")]
    NegativeLength { edge: usize, length: f64 },
    #[error("edge {edge}: self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge}: duplicate of edge {first} ({tail} -> {head})")]
    DuplicateEdge {
        edge: usize,
        first: usize,
        tail: usize,
        head: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub len: f64,
}

/// Which way a search follows edges: `Outward` computes `dist(source, w)`,
/// `Inward` computes `dist(w, source)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outward,
    Inward,
}

/// Immutable directed graph on vertices `0..n`.
///
/// Edges keep the order they were given in; an edge's position is its id
/// everywhere in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiGraph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl DiGraph {
    /// Validates and builds a graph. Lengths must be finite and `>= 0`, with
    /// no self-loops and at most one edge per ordered pair.
    pub fn new(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut out_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut edges: Vec<Edge> = Vec::with_capacity(edge_list.len());
        for (id, &(tail, head, len)) in edge_list.iter().enumerate() {
            for vertex in [tail, head] {
                if vertex >= n {
                    return Err(GraphError::IndexOutOfRange {
                        edge: id,
                        vertex,
                        n,
                    });
                }
            }
            if !(len >= 0.0) || !len.is_finite() {
                return Err(GraphError::NegativeLength { edge: id, length: len });
            }
            if tail == head {
                return Err(GraphError::SelfLoop {
                    edge: id,
                    vertex: tail,
                });
            }
            if let Some(&first) = out_adj[tail].iter().find(|&&e| edges[e].head == head) {
                return Err(GraphError::DuplicateEdge {
                    edge: id,
                    first,
                    tail,
                    head,
                });
            }
            out_adj[tail].push(id);
            in_adj[head].push(id);
            edges.push(Edge { tail, head, len });
        }
        Ok(DiGraph {
            n,
            edges,
            out_adj,
            in_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// Edge ids leaving `v`, in increasing id order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Edge ids entering `v`, in increasing id order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn find_edge(&self, tail: usize, head: usize) -> Option<usize> {
        self.out_adj
            .get(tail)?
            .iter()
            .copied()
            .find(|&e| self.edges[e].head == head)
    }

    pub fn is_unit_length(&self) -> bool {
        self.edges.iter().all(|e| e.len == 1.0)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    /// Triples suitable for feeding back into [`DiGraph::new`].
    pub fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        self.edges.iter().map(|e| (e.tail, e.head, e.len)).collect()
    }

    /// Same vertex set, only the listed edges (ids refer to `self`). The
    /// returned graph numbers its edges in the order given.
    pub fn edge_subgraph(&self, ids: &[usize]) -> DiGraph {
        let list: Vec<_> = ids
            .iter()
            .map(|&e| {
                let edge = self.edges[e];
                (edge.tail, edge.head, edge.len)
            })
            .collect();
        DiGraph::new(self.n, &list).expect("edge subset of a valid graph")
    }

    /// Endpoint of `edge` reached when moving in `dir`.
    fn step(&self, edge: usize, dir: Direction) -> usize {
        match dir {
            Direction::Outward => self.edges[edge].head,
            Direction::Inward => self.edges[edge].tail,
        }
    }

    fn incident(&self, v: usize, dir: Direction) -> &[usize] {
        match dir {
            Direction::Outward => &self.out_adj[v],
            Direction::Inward => &self.in_adj[v],
        }
    }

    /// Weakly connected components, each sorted, ordered by smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                let nbrs = self.out_adj[v]
                    .iter()
                    .map(|&e| self.edges[e].head)
                    .chain(self.in_adj[v].iter().map(|&e| self.edges[e].tail));
                for w in nbrs {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// Single-source distances plus the tree edge realizing each one.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub source: usize,
    pub direction: Direction,
    pub dist: Vec<f64>,
    pub parent_edge: Vec<Option<usize>>,
    /// Vertices in the order they were settled; reachable vertices only.
    pub order: Vec<usize>,
}

impl DistanceMap {
    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    // Min-heap on (dist, vertex).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`. Ties between equal-distance predecessors go to
/// the lowest edge id among edges from vertices settled earlier, so the
/// parent pointers always form a tree even with zero-length edges.
pub fn shortest_paths(g: &DiGraph, source: usize, direction: Direction) -> DistanceMap {
    assert!(source < g.n(), "source {source} out of range");
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut parent_edge = vec![None; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        if v != source {
            // Lowest-id edge from an already settled vertex achieving dist[v].
            let back = match direction {
                Direction::Outward => Direction::Inward,
                Direction::Inward => Direction::Outward,
            };
            parent_edge[v] = g
                .incident(v, back)
                .iter()
                .copied()
                .filter(|&e| {
                    let w = g.step(e, back);
                    settled[w] && w != v && dist[w] + g.edges[e].len == dist[v]
                })
                .min();
            debug_assert!(parent_edge[v].is_some());
        }
        for &e in g.incident(v, direction) {
            let w = g.step(e, direction);
            let cand = d + g.edges[e].len;
            if !settled[w] && cand < dist[w] {
                dist[w] = cand;
                heap.push(HeapItem {
                    dist: cand,
                    vertex: w,
                });
            }
        }
    }
    DistanceMap {
        source,
        direction,
        dist,
        parent_edge,
        order,
    }
}

/// Outward (out of the root) or inward (into the root) shortest-path tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SpTree {
    pub root: usize,
    pub orientation: Direction,
    /// Sorted edge ids of `g`.
    pub tree_edges: Vec<usize>,
}

pub fn shortest_path_tree(g: &DiGraph, root: usize, orientation: Direction) -> SpTree {
    let dm = shortest_paths(g, root, orientation);
    let mut tree_edges: Vec<usize> = dm.parent_edge.iter().flatten().copied().collect();
    tree_edges.sort_unstable();
    SpTree {
        root,
        orientation,
        tree_edges,
    }
}

/// Subgraph induced by `vs`, with `map[i]` the vertex of `g` that became
/// vertex `i`. Vertex order follows `vs`; edges keep their relative order.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: DiGraph,
    pub vertex_map: Vec<usize>,
    /// `edge_map[i]` is the id in the parent graph of edge `i`.
    pub edge_map: Vec<usize>,
}

impl InducedSubgraph {
    pub fn local_vertex(&self, v: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&w| w == v)
    }
}

pub fn induced_subgraph(g: &DiGraph, vs: &[usize]) -> InducedSubgraph {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in vs.iter().enumerate() {
        assert!(v < g.n(), "vertex {v} out of range");
        assert!(local[v] == usize::MAX, "vertex {v} listed twice");
        local[v] = i;
    }
    let mut list = Vec::new();
    let mut edge_map = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if local[e.tail] != usize::MAX && local[e.head] != usize::MAX {
            list.push((local[e.tail], local[e.head], e.len));
            edge_map.push(id);
        }
    }
    InducedSubgraph {
        graph: DiGraph::new(vs.len(), &list).expect("induced subgraph of a valid graph"),
        vertex_map: vs.to_vec(),
        edge_map,
    }
}

/// All-pairs distances, `d[u][v] = dist(u, v)`.
pub fn distance_matrix(g: &DiGraph) -> Vec<Vec<f64>> {
    (0..g.n())
        .map(|u| shortest_paths(g, u, Direction::Outward).dist)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn cycle(n: usize) -> DiGraph {
        let list: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        DiGraph::new(n, &list).unwrap()
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(DiGraph::new(2, &[(0, 1, 1.0)]).unwrap().m(), 1);
        assert!(matches!(
            DiGraph::new(2, &[(0, 0, 1.0)]),
            Err(GraphError::SelfLoop { .. })
        ));
        assert!(matches!(
            DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 1, 2.0)]),
            Err(GraphError::DuplicateEdge { edge: 2, first: 0, .. })
        ));
        assert!(matches!(
            DiGraph::new(2, &[(0, 2, 1.0)]),
            Err(GraphError::IndexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            DiGraph::new(2, &[(0, 1, -1.0)]),
            Err(GraphError::NegativeLength { .. })
        ));
        assert!(DiGraph::new(2, &[(0, 1, f64::NAN)]).is_err());
        assert!(DiGraph::new(2, &[(0, 1, 0.0)]).is_ok());
    }

    #[test]
    fn path_distances() {
        let g = DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(shortest_paths(&g, 0, Direction::Outward).dist, vec![0.0, 1.0, 2.0]);
        assert_eq!(shortest_paths(&g, 2, Direction::Outward).dist, vec![INF, INF, 0.0]);
        assert_eq!(shortest_paths(&g, 2, Direction::Inward).dist, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn cycle_distances() {
        assert_eq!(
            shortest_paths(&cycle(4), 0, Direction::Outward).dist,
            vec![0.0, 1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn sp_tree_examples() {
        let star = DiGraph::new(3, &[(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(
            shortest_path_tree(&star, 0, Direction::Outward).tree_edges,
            vec![0, 1]
        );
        let path = DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(shortest_path_tree(&path, 2, Direction::Outward)
            .tree_edges
            .is_empty());
        let g = DiGraph::new(3, &[(0, 1, 1.0), (0, 2, 3.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(shortest_path_tree(&g, 0, Direction::Outward).tree_edges, vec![0, 2]);
        assert_eq!(shortest_path_tree(&g, 2, Direction::Inward).tree_edges, vec![0, 2]);
    }

    #[test]
    fn ties_pick_lowest_edge_id() {
        // Two equal routes into 3: via 1 (edge 2) and via 2 (edge 3).
        let g = DiGraph::new(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let dm = shortest_paths(&g, 0, Direction::Outward);
        assert_eq!(dm.parent_edge[3], Some(2));
    }

    #[test]
    fn zero_length_cycle_still_gives_tree() {
        let g = DiGraph::new(
            3,
            &[(1, 2, 0.0), (2, 1, 0.0), (0, 1, 1.0), (0, 2, 1.0)],
        )
        .unwrap();
        let dm = shortest_paths(&g, 0, Direction::Outward);
        assert_eq!(dm.dist, vec![0.0, 1.0, 1.0]);
        assert_eq!(dm.parent_edge, vec![None, Some(2), Some(0)]);
    }

    #[test]
    fn induced_examples() {
        let tri = cycle(3);
        let sub = induced_subgraph(&tri, &[0, 1]);
        assert_eq!(sub.graph.edge_list(), vec![(0, 1, 1.0)]);
        assert_eq!(sub.edge_map, vec![0]);
        let all = induced_subgraph(&tri, &[0, 1, 2]);
        assert_eq!(all.graph, tri);
        let empty = induced_subgraph(&tri, &[]);
        assert_eq!((empty.graph.n(), empty.graph.m()), (0, 0));
    }

    #[test]
    fn distance_matrix_examples() {
        let g = DiGraph::new(2, &[(0, 1, 5.0)]).unwrap();
        assert_eq!(distance_matrix(&g), vec![vec![0.0, 5.0], vec![INF, 0.0]]);
        let d = distance_matrix(&cycle(3));
        for (u, row) in d.iter().enumerate() {
            for (v, &x) in row.iter().enumerate() {
                if u != v {
                    assert!(x == 1.0 || x == 2.0);
                }
            }
        }
        let e = DiGraph::new(2, &[]).unwrap();
        assert_eq!(distance_matrix(&e), vec![vec![0.0, INF], vec![INF, 0.0]]);
    }

    #[test]
    fn components() {
        let g = DiGraph::new(5, &[(1, 0, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(g.weak_components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
