//! Arborescences rooted at a vertex, their tree potentials and shortcut sets.
//!
//! For an arborescence `T` rooted at `u`, the potential of `w` is the tree
//! distance `d_T(u, w)` and the shortcut set `S_T` holds every edge
//! `(w1, w2)` with `L_T(w2) > L_T(w1) + len(w1, w2)`. Vertices outside `T`
//! have potential `+inf`, so an edge leaving `T` is always a shortcut and an
//! edge entering it never is.

use thiserror::Error;

use crate::graph::{shortest_paths, DiGraph, Direction};

pub const DEFAULT_MAX_ARBORESCENCES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArborescenceError {
    #[error("vertex {0} is not reachable from the root")]
    NotReachable(usize),
    #[error("more than {0} arborescences")]
    ExplosionCap(usize),
}

/// Which rooted trees to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Trees covering every vertex.
    Spanning,
    /// Trees on any vertex subset containing the root.
    Rooted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arborescence {
    pub root: usize,
    pub parent_edge: Vec<Option<usize>>,
    pub potentials: Vec<f64>,
    /// Sorted edge ids.
    pub cut_set: Vec<usize>,
}

impl Arborescence {
    /// Builds potentials and the shortcut set from parent pointers. Vertices
    /// other than the root without a parent are outside the tree.
    pub fn from_parents(g: &DiGraph, root: usize, parent_edge: Vec<Option<usize>>) -> Self {
        let n = g.n();
        assert_eq!(parent_edge.len(), n);
        assert!(parent_edge[root].is_none(), "root has a parent");
        let mut potentials = vec![f64::NAN; n];
        potentials[root] = 0.0;
        let mut chain = Vec::new();
        for start in 0..n {
            let mut w = start;
            while potentials[w].is_nan() {
                chain.push(w);
                match parent_edge[w] {
                    Some(e) => {
                        assert_eq!(g.edge(e).head, w, "parent edge {e} does not enter {w}");
                        w = g.edge(e).tail;
                    }
                    None => {
                        potentials[w] = f64::INFINITY;
                        chain.pop();
                        break;
                    }
                }
                assert!(chain.len() <= n, "parent pointers contain a cycle");
            }
            while let Some(x) = chain.pop() {
                let e = parent_edge[x].unwrap();
                potentials[x] = potentials[g.edge(e).tail] + g.edge(e).len;
            }
        }
        let cut_set = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| potentials[e.head] > potentials[e.tail] + e.len)
            .map(|(i, _)| i)
            .collect();
        Arborescence {
            root,
            parent_edge,
            potentials,
            cut_set,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.potentials[v].is_finite()
    }

    /// `d_T(root, v)`, infinite outside the tree.
    pub fn depth(&self, v: usize) -> f64 {
        self.potentials[v]
    }

    pub fn is_spanning(&self) -> bool {
        self.potentials.iter().all(|p| p.is_finite())
    }

    /// Tree edges; an edge whose parent is outside the tree is not one.
    pub fn tree_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent_edge
            .iter()
            .enumerate()
            .filter(|(v, _)| self.contains(*v))
            .filter_map(|(_, e)| *e)
    }
}

/// Lazily enumerates rooted arborescences, each exactly once.
///
/// Every non-root vertex picks a parent among its in-edges (or, for
/// [`Family::Rooted`], no parent); choices closing a cycle are rejected as
/// soon as they are made.
pub struct Arborescences<'a> {
    g: &'a DiGraph,
    root: usize,
    family: Family,
    verts: Vec<usize>,
    options: Vec<Vec<Option<usize>>>,
    choice: Vec<usize>,
    parent: Vec<Option<usize>>,
    assigned: Vec<bool>,
    pos: usize,
    produced: usize,
    cap: usize,
    done: bool,
}

pub fn enumerate_arborescences(
    g: &DiGraph,
    root: usize,
    family: Family,
    cap: usize,
) -> Result<Arborescences<'_>, ArborescenceError> {
    let reach = shortest_paths(g, root, Direction::Outward).dist;
    let verts: Vec<usize> = (0..g.n()).filter(|&v| v != root).collect();
    let mut options = Vec::with_capacity(verts.len());
    for &v in &verts {
        let mut opts: Vec<Option<usize>> = Vec::new();
        if reach[v].is_finite() {
            opts.extend(g.in_edges(v).iter().map(|&e| Some(e)));
        } else if family == Family::Spanning {
            return Err(ArborescenceError::NotReachable(v));
        }
        if family == Family::Rooted {
            opts.push(None);
        }
        options.push(opts);
    }
    let mut assigned = vec![false; g.n()];
    assigned[root] = true;
    Ok(Arborescences {
        g,
        root,
        family,
        choice: vec![0; verts.len()],
        verts,
        options,
        parent: vec![None; g.n()],
        assigned,
        pos: 0,
        produced: 0,
        cap,
        done: false,
    })
}

impl Arborescences<'_> {
    fn closes_cycle(&self, v: usize, e: usize) -> bool {
        let mut w = self.g.edge(e).tail;
        let mut steps = 0;
        while w != self.root && self.assigned[w] {
            if w == v {
                return true;
            }
            match self.parent[w] {
                Some(p) => w = self.g.edge(p).tail,
                None => return false,
            }
            steps += 1;
            debug_assert!(steps <= self.g.n());
        }
        w == v
    }

    /// Every vertex with a parent hangs below the root.
    fn connected(&self) -> bool {
        self.verts.iter().all(|&v| {
            let mut w = v;
            while let Some(e) = self.parent[w] {
                w = self.g.edge(e).tail;
            }
            w == self.root || self.parent[v].is_none()
        })
    }
}

impl Iterator for Arborescences<'_> {
    type Item = Result<Arborescence, ArborescenceError>;

    fn next(&mut self) -> Option<Self::Item> {
        let len = self.verts.len();
        while !self.done {
            if self.pos == len {
                if len == 0 {
                    self.done = true;
                } else {
                    self.pos = len - 1;
                }
                if self.family == Family::Rooted && !self.connected() {
                    continue;
                }
                self.produced += 1;
                if self.produced > self.cap {
                    self.done = true;
                    return Some(Err(ArborescenceError::ExplosionCap(self.cap)));
                }
                return Some(Ok(Arborescence::from_parents(
                    self.g,
                    self.root,
                    self.parent.clone(),
                )));
            }
            let v = self.verts[self.pos];
            self.assigned[v] = false;
            self.parent[v] = None;
            if self.choice[self.pos] == self.options[self.pos].len() {
                self.choice[self.pos] = 0;
                if self.pos == 0 {
                    self.done = true;
                } else {
                    self.pos -= 1;
                }
                continue;
            }
            let opt = self.options[self.pos][self.choice[self.pos]];
            self.choice[self.pos] += 1;
            if let Some(e) = opt {
                if self.closes_cycle(v, e) {
                    continue;
                }
            }
            self.parent[v] = opt;
            self.assigned[v] = true;
            self.pos += 1;
        }
        None
    }
}

/// Arborescence formed by the shortest-path tree of the subgraph on
/// `h_edges` (ids of `g`) rooted at `root`.
pub fn shortest_path_arborescence(g: &DiGraph, h_edges: &[usize], root: usize) -> Arborescence {
    let (h, ids) = super::spanner::sub_on(g, h_edges);
    let dm = shortest_paths(&h, root, Direction::Outward);
    let parents = dm.parent_edge.iter().map(|p| p.map(|e| ids[e])).collect();
    Arborescence::from_parents(g, root, parents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(g: &DiGraph, root: usize, family: Family) -> Vec<Arborescence> {
        enumerate_arborescences(g, root, family, DEFAULT_MAX_ARBORESCENCES)
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap()
    }

    /// Independent count: every parent vector, filtered for reaching the root.
    fn brute_count(g: &DiGraph, root: usize, family: Family) -> usize {
        let n = g.n();
        let mut opts: Vec<Vec<Option<usize>>> = (0..n)
            .map(|v| {
                if v == root {
                    return vec![None];
                }
                let mut o: Vec<_> = g.in_edges(v).iter().map(|&e| Some(e)).collect();
                if family == Family::Rooted {
                    o.push(None);
                }
                o
            })
            .collect();
        opts.iter_mut().for_each(|o| o.sort());
        let mut count = 0;
        let mut idx = vec![0usize; n];
        'outer: loop {
            let parent: Vec<Option<usize>> = (0..n).map(|v| opts[v][idx[v]]).collect();
            let ok = (0..n).all(|v| {
                if v != root && parent[v].is_none() {
                    return true;
                }
                let mut w = v;
                for _ in 0..=n {
                    if w == root {
                        return true;
                    }
                    match parent[w] {
                        Some(e) => w = g.edge(e).tail,
                        None => return false,
                    }
                }
                false
            });
            if ok {
                count += 1;
            }
            for v in 0..n {
                idx[v] += 1;
                if idx[v] < opts[v].len() {
                    continue 'outer;
                }
                idx[v] = 0;
            }
            break;
        }
        count
    }

    #[test]
    fn path_has_one() {
        let g = DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let all = collect(&g, 0, Family::Spanning);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].potentials, vec![0.0, 1.0, 2.0]);
        assert!(all[0].cut_set.is_empty());
    }

    #[test]
    fn triangle_has_two() {
        // u=0, w=1, v=2: u->w, w->v, u->v
        let g = DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let all = collect(&g, 0, Family::Spanning);
        assert_eq!(all.len(), 2);
        let via_w = all.iter().find(|a| a.parent_edge[2] == Some(1)).unwrap();
        assert_eq!(via_w.depth(2), 2.0);
        assert_eq!(via_w.cut_set, vec![2]);
        let direct = all.iter().find(|a| a.parent_edge[2] == Some(2)).unwrap();
        assert!(direct.cut_set.is_empty());
    }

    #[test]
    fn diamond_counts_match_brute_force() {
        let g = DiGraph::new(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap();
        for family in [Family::Spanning, Family::Rooted] {
            assert_eq!(collect(&g, 0, family).len(), brute_count(&g, 0, family));
        }
    }

    #[test]
    fn rooted_family_includes_partial_trees() {
        let g = DiGraph::new(2, &[(0, 1, 3.0)]).unwrap();
        let all = collect(&g, 0, Family::Rooted);
        assert_eq!(all.len(), 2);
        let lone = all.iter().find(|a| !a.contains(1)).unwrap();
        assert_eq!(lone.depth(1), f64::INFINITY);
        assert_eq!(lone.cut_set, vec![0]);
        assert_eq!(lone.tree_edges().count(), 0);
    }

    #[test]
    fn unreachable_vertex() {
        let g = DiGraph::new(3, &[(0, 1, 1.0), (2, 1, 1.0)]).unwrap();
        assert!(matches!(
            enumerate_arborescences(&g, 0, Family::Spanning, 10),
            Err(ArborescenceError::NotReachable(2))
        ));
        assert_eq!(collect(&g, 0, Family::Rooted).len(), 2);
    }

    #[test]
    fn cap_is_an_error() {
        let g = DiGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let items: Vec<_> = enumerate_arborescences(&g, 0, Family::Spanning, 1)
            .unwrap()
            .collect();
        assert_eq!(items.len(), 2);
        assert_eq!(items[1], Err(ArborescenceError::ExplosionCap(1)));
    }

    #[test]
    fn single_vertex() {
        let g = DiGraph::new(1, &[]).unwrap();
        assert_eq!(collect(&g, 0, Family::Spanning).len(), 1);
    }

    #[test]
    fn sp_arborescence_has_no_shortcuts_in_h() {
        let g = DiGraph::new(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0), (2, 3, 1.0), (3, 1, 1.0)],
        )
        .unwrap();
        let h = [0, 2, 3, 4];
        let t = shortest_path_arborescence(&g, &h, 0);
        assert!(t.cut_set.iter().all(|e| !h.contains(e)));
        assert!(t.is_spanning());
    }
}
