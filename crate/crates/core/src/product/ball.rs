//! Finite windows onto lazily described graphs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{Debug, Write as _};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::ProductError;
use crate::graph::FiniteGraph;

pub const DEFAULT_CAP: usize = 50_000;

/// A graph known only through its neighbour function.
pub trait LazyGraph {
    type Vertex: Clone + Eq + Hash + Ord + Debug;

    /// Number of edge colours.
    fn colours(&self) -> usize;

    /// Neighbours with edge colours, in a deterministic order.
    fn lazy_neighbours(&self, v: &Self::Vertex)
        -> Result<Vec<(Self::Vertex, usize)>, ProductError>;

    /// A canonical representative of the `colour`-sheet through `v`, when
    /// the graph carries a sheet structure.
    fn sheet_anchor(&self, _v: &Self::Vertex, _colour: usize) -> Option<Self::Vertex> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BallEdge {
    pub a: usize,
    pub b: usize,
    pub colour: usize,
}

/// A sheet restricted to a ball: its colour, canonical anchor, and the
/// indices of the ball vertices it contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSheet<V> {
    pub colour: usize,
    pub anchor: V,
    pub members: Vec<usize>,
}

/// The metric ball of radius `radius` around `center` with every edge
/// between its vertices. Vertex 0 is the centre; vertices appear in BFS
/// order. Vertices at distance `< radius` have all their neighbours inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball<V: Eq + Hash> {
    pub center: V,
    pub radius: usize,
    pub vertices: Vec<V>,
    pub dist: Vec<usize>,
    pub edges: Vec<BallEdge>,
    pub sheets: Vec<BallSheet<V>>,
    index: HashMap<V, usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// BFS out to `radius`, failing once more than `cap` vertices are found.
pub fn enumerate_ball<G: LazyGraph>(
    g: &G,
    center: G::Vertex,
    radius: usize,
    cap: usize,
) -> Result<Ball<G::Vertex>, ProductError> {
    let mut vertices = vec![center.clone()];
    let mut dist = vec![0];
    let mut index = HashMap::from([(center.clone(), 0)]);
    let mut neighbour_lists: Vec<Vec<(G::Vertex, usize)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    if cap == 0 {
        return Err(ProductError::CapExceeded { cap, partial: 1 });
    }
    while let Some(i) = queue.pop_front() {
        let nbrs = g.lazy_neighbours(&vertices[i])?;
        if dist[i] < radius {
            for (w, _) in &nbrs {
                if !index.contains_key(w) {
                    if vertices.len() >= cap {
                        return Err(ProductError::CapExceeded {
                            cap,
                            partial: vertices.len() + 1,
                        });
                    }
                    index.insert(w.clone(), vertices.len());
                    vertices.push(w.clone());
                    dist.push(dist[i] + 1);
                    queue.push_back(vertices.len() - 1);
                }
            }
        }
        neighbour_lists.push(nbrs);
    }
    let mut edges = Vec::new();
    for (i, nbrs) in neighbour_lists.iter().enumerate() {
        for (w, colour) in nbrs {
            if let Some(&j) = index.get(w) {
                if i < j {
                    edges.push(BallEdge {
                        a: i,
                        b: j,
                        colour: *colour,
                    });
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    let mut sheets = Vec::new();
    if g.sheet_anchor(&center, 0).is_some() {
        let mut by_key: BTreeMap<(usize, G::Vertex), Vec<usize>> = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            for c in 0..g.colours() {
                let anchor = g.sheet_anchor(v, c).expect("sheet structure is uniform");
                by_key.entry((c, anchor)).or_default().push(i);
            }
        }
        sheets = by_key
            .into_iter()
            .map(|((colour, anchor), members)| BallSheet {
                colour,
                anchor,
                members,
            })
            .collect();
    }
    Ok(Ball::assemble(
        center, radius, vertices, dist, edges, sheets,
    ))
}

impl<V: Clone + Eq + Hash + Ord + Debug> Ball<V> {
    fn assemble(
        center: V,
        radius: usize,
        vertices: Vec<V>,
        dist: Vec<usize>,
        edges: Vec<BallEdge>,
        sheets: Vec<BallSheet<V>>,
    ) -> Self {
        let index = vertices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for e in &edges {
            adjacency[e.a].push((e.b, e.colour));
            adjacency[e.b].push((e.a, e.colour));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ball {
            center,
            radius,
            vertices,
            dist,
            edges,
            sheets,
            index,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &V) -> bool {
        self.index.contains_key(v)
    }

    /// Neighbours of vertex `i` inside the ball, with edge colours.
    pub fn adjacent(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    /// Whether vertex `i` has its complete neighbourhood inside the ball.
    pub fn is_interior(&self, i: usize) -> bool {
        self.dist[i] < self.radius
    }

    /// The underlying uncoloured graph; vertex indices are kept.
    pub fn to_graph(&self) -> FiniteGraph {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        FiniteGraph::new(self.len(), &edges).expect("ball edges are valid")
    }

    /// Vertex indices within distance `r` of the centre.
    pub fn within(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.dist[i] <= r)
    }

    pub fn to_json(&self) -> BallJson<V> {
        BallJson {
            center: self.center.clone(),
            radius: self.radius,
            vertices: self
                .vertices
                .iter()
                .zip(&self.dist)
                .map(|(v, &dist)| BallVertex {
                    word: v.clone(),
                    dist,
                })
                .collect(),
            edges: self.edges.clone(),
            sheets: self.sheets.clone(),
        }
    }

    pub fn from_json(doc: BallJson<V>) -> Self {
        let (vertices, dist) = doc.vertices.into_iter().map(|v| (v.word, v.dist)).unzip();
        Ball::assemble(
            doc.center, doc.radius, vertices, dist, doc.edges, doc.sheets,
        )
    }

    /// Graphviz rendering; edges are coloured by a palette indexed by colour.
    pub fn to_dot(&self, label: impl Fn(&V) -> String) -> String {
        const PALETTE: [&str; 8] = [
            "red",
            "blue",
            "darkgreen",
            "orange",
            "purple",
            "brown",
            "magenta",
            "cyan",
        ];
        let mut out = String::from("graph ball {\n  node [shape=circle];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let text = label(v).replace('"', "\\\"");
            let _ = writeln!(out, "  v{i} [label=\"{text}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  v{} -- v{} [color={}];",
                e.a,
                e.b,
                PALETTE[e.colour % PALETTE.len()]
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallVertex<V> {
    pub word: V,
    pub dist: usize,
}

/// Serialised form of a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson<V> {
    pub center: V,
    pub radius: usize,
    pub vertices: Vec<BallVertex<V>>,
    pub edges: Vec<BallEdge>,
    pub sheets: Vec<BallSheet<V>>,
}
