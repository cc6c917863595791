//! Finite simple graphs and the connectivity tools the products are built from.

mod group;
mod iso;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use group::GroupTable;
pub use iso::{
    automorphism_group_order, automorphisms, find_isomorphism, for_each_isomorphism,
    is_vertex_transitive,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("invalid group table: {0}")]
    Group(String),
}

/// A finite simple graph on the vertices `0..n`.
///
/// Adjacency lists are sorted and duplicate-free; every edge is stored in
/// both endpoints' lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl FiniteGraph {
    /// Builds a graph from an edge list. Repeated edges collapse.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(x, y) in edges {
            for v in [x, y] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if x == y {
                return Err(GraphError::SelfLoop(x));
            }
            adj[x].push(y);
            adj[y].push(x);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(FiniteGraph { adj, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.order() {
            return Err(GraphError::LabelCount {
                expected: self.order(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn empty(n: usize) -> Self {
        FiniteGraph {
            adj: vec![Vec::new(); n],
            labels: None,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                edges.push((x, y));
            }
        }
        Self::new(n, &edges).expect("complete graph edges are valid")
    }

    /// The star with one centre (vertex 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("star edges are valid")
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as pairs `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (x, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&y| y > x).map(|&y| (x, y)));
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of `x`, or its index when the graph is unlabelled.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Resolves a vertex by label first, then by decimal index.
    pub fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(labels) = &self.labels {
            if let Some(i) = labels.iter().position(|l| l == name) {
                return Some(i);
            }
        }
        name.parse::<usize>().ok().filter(|&i| i < self.order())
    }

    fn check(&self, x: usize) -> Result<(), GraphError> {
        if x < self.order() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: x,
                n: self.order(),
            })
        }
    }

    pub fn neighbours(&self, x: usize) -> Result<&[usize], GraphError> {
        self.check(x)?;
        Ok(&self.adj[x])
    }

    /// Unchecked neighbour access for callers that already hold a valid index.
    pub(crate) fn nbrs(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn degree(&self, x: usize) -> Result<usize, GraphError> {
        Ok(self.neighbours(x)?.len())
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        x < self.order() && self.adj[x].binary_search(&y).is_ok()
    }

    /// BFS distances from `x`; `None` for unreachable vertices.
    pub fn distances_from(&self, x: usize) -> Result<Vec<Option<usize>>, GraphError> {
        self.check(x)?;
        Ok(self.bfs_avoiding(x, None))
    }

    fn bfs_avoiding(&self, start: usize, removed: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.order()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued vertices have a distance");
            for &y in &self.adj[x] {
                if Some(y) != removed && dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// All-pairs distances. Panics on disconnected graphs.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.order())
            .map(|x| {
                self.bfs_avoiding(x, None)
                    .into_iter()
                    .map(|d| d.expect("distance_matrix needs a connected graph"))
                    .collect()
            })
            .collect()
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self
            .distance_matrix()
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(0))
    }

    pub fn is_connected(&self) -> bool {
        if self.order() == 0 {
            return true;
        }
        self.bfs_avoiding(0, None).iter().all(Option::is_some)
    }

    /// Cut vertices via low-link numbers, in increasing order.
    pub fn cut_vertices(&self) -> Result<Vec<usize>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let n = self.order();
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut is_cut = vec![false; n];
        let dfs = self.dfs_lowlink(0);
        let mut root_children = 0;
        for v in 0..n {
            if let Some(p) = dfs.parent[v] {
                if p == 0 {
                    root_children += 1;
                } else if dfs.low[v] >= dfs.disc[p] {
                    is_cut[p] = true;
                }
            }
        }
        is_cut[0] = root_children > 1;
        Ok((0..n).filter(|&v| is_cut[v]).collect())
    }

    pub fn is_two_connected(&self) -> Result<bool, GraphError> {
        Ok(self.cut_vertices()?.is_empty())
    }

    /// Iterative DFS from `root` recording discovery times, parents and low-links.
    fn dfs_lowlink(&self, root: usize) -> LowLink {
        let n = self.order();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        let mut time = 0;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < self.adj[v].len() {
                let w = self.adj[v][*next];
                *next += 1;
                if disc[w] == usize::MAX {
                    parent[w] = Some(v);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, 0));
                } else if parent[v] != Some(w) {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(p) = parent[v] {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
        LowLink { disc, low, parent }
    }

    /// Vertex sets of the biconnected components (blocks), each sorted.
    ///
    /// Isolated vertices form singleton blocks. Blocks are listed in order of
    /// their least vertex.
    pub fn biconnected_components(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        let mut time = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            if self.adj[root].is_empty() {
                disc[root] = time;
                time += 1;
                blocks.push(vec![root]);
                continue;
            }
            let mut edge_stack: Vec<(usize, usize)> = Vec::new();
            let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
                if *next < self.adj[v].len() {
                    let w = self.adj[v][*next];
                    *next += 1;
                    if disc[w] == usize::MAX {
                        edge_stack.push((v, w));
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, Some(v), 0));
                    } else if Some(w) != parent && disc[w] < disc[v] {
                        edge_stack.push((v, w));
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(p) = parent {
                        low[p] = low[p].min(low[v]);
                        if low[v] >= disc[p] {
                            let mut block = Vec::new();
                            while let Some((a, b)) = edge_stack.pop() {
                                block.push(a);
                                block.push(b);
                                if (a, b) == (p, v) {
                                    break;
                                }
                            }
                            block.sort_unstable();
                            block.dedup();
                            blocks.push(block);
                        }
                    }
                }
            }
        }
        blocks.sort();
        blocks
    }

    /// The subgraph induced on `keep` (in the given order), with labels carried over.
    pub fn induced(&self, keep: &[usize]) -> FiniteGraph {
        let mut pos = vec![usize::MAX; self.order()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX && pos[w] > i {
                    edges.push((i, pos[w]));
                }
            }
        }
        let g = FiniteGraph::new(keep.len(), &edges).expect("induced edges are valid");
        match &self.labels {
            Some(l) => g
                .with_labels(keep.iter().map(|&v| l[v].clone()).collect())
                .expect("label count matches"),
            None => g,
        }
    }
}

struct LowLink {
    disc: Vec<usize>,
    low: Vec<usize>,
    parent: Vec<Option<usize>>,
}

/// A finite graph with a distinguished root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: FiniteGraph,
    pub root: usize,
}

impl RootedGraph {
    pub fn new(graph: FiniteGraph, root: usize) -> Result<Self, GraphError> {
        graph.check(root)?;
        Ok(RootedGraph { graph, root })
    }
}

/// Result of a connected sum: the glued graph, the merged root, and where the
/// vertices of the second summand ended up.
#[derive(Debug, Clone)]
pub struct ConnectedSum {
    pub graph: FiniteGraph,
    pub root: usize,
    pub b_index: Vec<usize>,
}

/// Disjoint union of `a` and `b` with the two roots identified.
///
/// Vertices of `a` keep their indices; the non-root vertices of `b` follow in
/// order. The merged vertex is `a.root`.
pub fn connected_sum(a: &RootedGraph, b: &RootedGraph) -> ConnectedSum {
    let na = a.graph.order();
    let mut b_index = Vec::with_capacity(b.graph.order());
    let mut next = na;
    for v in 0..b.graph.order() {
        if v == b.root {
            b_index.push(a.root);
        } else {
            b_index.push(next);
            next += 1;
        }
    }
    let mut edges = a.graph.edges();
    edges.extend(
        b.graph
            .edges()
            .into_iter()
            .map(|(x, y)| (b_index[x], b_index[y])),
    );
    let mut graph = FiniteGraph::new(next, &edges).expect("glued edges are valid");
    if a.graph.labels.is_some() || b.graph.labels.is_some() {
        let mut labels: Vec<String> = (0..na).map(|v| a.graph.label(v)).collect();
        for v in 0..b.graph.order() {
            if v != b.root {
                labels.push(b.graph.label(v));
            }
        }
        graph = graph.with_labels(labels).expect("label count matches");
    }
    ConnectedSum {
        graph,
        root: a.root,
        b_index,
    }
}

/// The Cayley graph of a group with respect to its generator list.
pub fn cayley_graph(g: &GroupTable) -> Result<FiniteGraph, GraphError> {
    if g.generators().contains(&g.identity()) {
        return Err(GraphError::Group(
            "the identity cannot be a generator".into(),
        ));
    }
    let mut edges = Vec::new();
    for x in 0..g.order() {
        for &s in g.generators() {
            edges.push((x, g.mul(x, s)));
        }
    }
    FiniteGraph::new(g.order(), &edges)
}

/// Serialised form of a graph: `n`, `edges`, optional `labels` and `root`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<FiniteGraph, GraphError> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = FiniteGraph::new(self.n, &edges)?;
        if let Some(root) = self.root {
            g.check(root)?;
        }
        match &self.labels {
            Some(l) => g.with_labels(l.clone()),
            None => Ok(g),
        }
    }

    pub fn from_graph(g: &FiniteGraph, root: Option<usize>) -> Self {
        GraphJson {
            n: g.order(),
            edges: g.edges().into_iter().map(|(x, y)| [x, y]).collect(),
            labels: g.labels.clone(),
            root,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled_g2() -> FiniteGraph {
        // b0, b1, b2 with edges {b1,b2}, {b2,b0}
        FiniteGraph::new(3, &[(1, 2), (2, 0)])
            .unwrap()
            .with_labels(vec!["b0".into(), "b1".into(), "b2".into()])
            .unwrap()
    }

    fn brute_cut_vertices(g: &FiniteGraph) -> Vec<usize> {
        (0..g.order())
            .filter(|&v| {
                let keep: Vec<_> = (0..g.order()).filter(|&w| w != v).collect();
                !g.induced(&keep).is_connected()
            })
            .collect()
    }

    #[test]
    fn neighbour_examples() {
        let g2 = labelled_g2();
        assert_eq!(g2.neighbours(0).unwrap(), &[2]);
        assert!(FiniteGraph::empty(1).neighbours(0).unwrap().is_empty());
        assert_eq!(FiniteGraph::cycle(4).neighbours(0).unwrap(), &[1, 3]);
        assert!(matches!(
            g2.neighbours(3),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn construction_rejects_loops_and_collapses_duplicates() {
        assert_eq!(FiniteGraph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        let g = FiniteGraph::new(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn connectivity_examples() {
        assert!(FiniteGraph::path(2).is_connected());
        assert!(!FiniteGraph::empty(2).is_connected());
        assert!(FiniteGraph::cycle(5).is_connected());
        assert!(FiniteGraph::empty(0).is_connected());
    }

    #[test]
    fn cut_vertex_examples() {
        assert_eq!(FiniteGraph::path(3).cut_vertices().unwrap(), vec![1]);
        assert!(FiniteGraph::cycle(4).cut_vertices().unwrap().is_empty());
        assert_eq!(labelled_g2().cut_vertices().unwrap(), vec![2]);
        assert_eq!(
            FiniteGraph::empty(2).cut_vertices(),
            Err(GraphError::Disconnected)
        );
        assert!(FiniteGraph::complete(4).is_two_connected().unwrap());
        assert!(!labelled_g2().is_two_connected().unwrap());
        assert!(FiniteGraph::path(2).is_two_connected().unwrap());
    }

    #[test]
    fn cut_vertices_match_brute_force_on_small_graphs() {
        let bowtie =
            FiniteGraph::new(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        let corpus = vec![
            FiniteGraph::path(5),
            FiniteGraph::cycle(6),
            FiniteGraph::complete(5),
            FiniteGraph::star(4),
            bowtie,
            labelled_g2(),
            FiniteGraph::new(
                7,
                &[
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 1),
                    (3, 4),
                    (4, 5),
                    (5, 6),
                    (6, 4),
                ],
            )
            .unwrap(),
        ];
        for g in &corpus {
            assert_eq!(g.cut_vertices().unwrap(), brute_cut_vertices(g));
        }
    }

    #[test]
    fn blocks_of_bowtie_and_path() {
        let bowtie =
            FiniteGraph::new(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(
            bowtie.biconnected_components(),
            vec![vec![0, 1, 2], vec![0, 3, 4]]
        );
        assert_eq!(
            FiniteGraph::path(4).biconnected_components(),
            vec![vec![0, 1], vec![1, 2], vec![2, 3]]
        );
        assert_eq!(
            FiniteGraph::cycle(5).biconnected_components(),
            vec![vec![0, 1, 2, 3, 4]]
        );
    }

    #[test]
    fn connected_sum_examples() {
        let t1 = RootedGraph::new(FiniteGraph::path(2), 0).unwrap();
        let s = connected_sum(&t1, &t1);
        assert_eq!(s.graph.order(), 3);
        assert_eq!(s.graph.edge_count(), 2);
        assert!(find_isomorphism(&s.graph, &FiniteGraph::path(3), &[])
            .unwrap()
            .is_some());

        let c3 = RootedGraph::new(FiniteGraph::cycle(3), 0).unwrap();
        let bow = connected_sum(&c3, &c3);
        assert_eq!((bow.graph.order(), bow.graph.edge_count()), (5, 6));
        assert_eq!(bow.graph.cut_vertices().unwrap(), vec![0]);

        let point = RootedGraph::new(FiniteGraph::empty(1), 0).unwrap();
        let c4 = RootedGraph::new(FiniteGraph::cycle(4), 2).unwrap();
        let s = connected_sum(&point, &c4);
        assert!(find_isomorphism(&s.graph, &c4.graph, &[(s.root, 2)])
            .unwrap()
            .is_some());
    }

    #[test]
    fn cayley_examples() {
        let c2 = GroupTable::cyclic(2, &[1]).unwrap();
        assert_eq!(cayley_graph(&c2).unwrap(), FiniteGraph::path(2));
        let c3 = GroupTable::cyclic(3, &[1, 2]).unwrap();
        assert_eq!(cayley_graph(&c3).unwrap(), FiniteGraph::cycle(3));
        let c4 = GroupTable::cyclic(4, &[1, 3]).unwrap();
        assert_eq!(cayley_graph(&c4).unwrap(), FiniteGraph::cycle(4));
        let bad = GroupTable::cyclic(3, &[0, 1, 2]);
        assert!(bad.is_err() || cayley_graph(&bad.unwrap()).is_err());
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        for g in [
            FiniteGraph::complete(6),
            FiniteGraph::cycle(7),
            FiniteGraph::star(3),
            labelled_g2(),
        ] {
            let total: usize = (0..g.order()).map(|x| g.degree(x).unwrap()).sum();
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn graph_json_round_trip() {
        let g = labelled_g2();
        let doc = GraphJson::from_graph(&g, Some(0));
        let text = serde_json::to_string(&doc).unwrap();
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
        assert_eq!(g.resolve("b2"), Some(2));
        assert_eq!(g.resolve("1"), Some(1));
        assert_eq!(g.resolve("b9"), None);
    }
}
