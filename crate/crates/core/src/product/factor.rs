use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::FiniteGraph;

/// A vertex of a factor: a dense index for finite factors, or a reduced
/// word of edge labels for a lazily enumerated regular tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorVertex {
    Index(usize),
    Path(Vec<u8>),
}

impl FactorVertex {
    pub fn index(&self) -> Option<usize> {
        match self {
            FactorVertex::Index(i) => Some(*i),
            FactorVertex::Path(_) => None,
        }
    }
}

impl From<usize> for FactorVertex {
    fn from(i: usize) -> Self {
        FactorVertex::Index(i)
    }
}

impl fmt::Display for FactorVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorVertex::Index(i) => write!(f, "{i}"),
            FactorVertex::Path(p) => {
                write!(f, "t")?;
                for a in p {
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

/// A finite factor with its distance table precomputed.
#[derive(Debug, Clone)]
pub struct FiniteFactor {
    graph: FiniteGraph,
    dist: Vec<Vec<usize>>,
}

impl FiniteFactor {
    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }
}

/// The `d`-regular tree. Vertices are reduced words over `0..d` (no letter
/// repeated twice in a row), the empty word being the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeFactor {
    pub degree: u8,
}

impl TreeFactor {
    fn contains(&self, w: &[u8]) -> bool {
        w.iter().all(|&a| a < self.degree) && w.windows(2).all(|p| p[0] != p[1])
    }

    fn neighbours(&self, w: &[u8]) -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(self.degree as usize);
        if let Some((_, rest)) = w.split_last() {
            out.push(rest.to_vec());
        }
        for a in 0..self.degree {
            if w.last() != Some(&a) {
                let mut next = w.to_vec();
                next.push(a);
                out.push(next);
            }
        }
        out
    }

    fn distance(&self, x: &[u8], y: &[u8]) -> usize {
        let common = x.iter().zip(y).take_while(|(a, b)| a == b).count();
        x.len() + y.len() - 2 * common
    }
}

/// A factor graph of a free product.
#[derive(Debug, Clone)]
pub enum Factor {
    Finite(FiniteFactor),
    Tree(TreeFactor),
}

impl Factor {
    /// Wraps a finite graph; callers validate connectivity and order.
    pub fn finite(graph: FiniteGraph) -> Self {
        let dist = if graph.is_connected() {
            graph.distance_matrix()
        } else {
            Vec::new()
        };
        Factor::Finite(FiniteFactor { graph, dist })
    }

    pub fn tree(degree: u8) -> Self {
        Factor::Tree(TreeFactor { degree })
    }

    /// Number of vertices, or `None` for an infinite tree (degree ≥ 2).
    pub fn order(&self) -> Option<usize> {
        match self {
            Factor::Finite(f) => Some(f.graph.order()),
            Factor::Tree(t) if t.degree <= 1 => Some(t.degree as usize + 1),
            Factor::Tree(_) => None,
        }
    }

    pub fn graph(&self) -> Option<&FiniteGraph> {
        match self {
            Factor::Finite(f) => Some(&f.graph),
            Factor::Tree(_) => None,
        }
    }

    pub fn is_connected(&self) -> bool {
        match self {
            Factor::Finite(f) => f.graph.is_connected(),
            Factor::Tree(_) => true,
        }
    }

    pub fn contains(&self, v: &FactorVertex) -> bool {
        match (self, v) {
            (Factor::Finite(f), FactorVertex::Index(i)) => *i < f.graph.order(),
            (Factor::Tree(t), FactorVertex::Path(p)) => t.contains(p),
            _ => false,
        }
    }

    /// A distinguished vertex: index 0, or the tree root.
    pub fn base_vertex(&self) -> FactorVertex {
        match self {
            Factor::Finite(_) => FactorVertex::Index(0),
            Factor::Tree(_) => FactorVertex::Path(Vec::new()),
        }
    }

    /// Sorted neighbours of a vertex known to belong to this factor.
    pub fn neighbours(&self, v: &FactorVertex) -> Vec<FactorVertex> {
        match (self, v) {
            (Factor::Finite(f), FactorVertex::Index(i)) => f
                .graph
                .nbrs(*i)
                .iter()
                .map(|&j| FactorVertex::Index(j))
                .collect(),
            (Factor::Tree(t), FactorVertex::Path(p)) => t
                .neighbours(p)
                .into_iter()
                .map(FactorVertex::Path)
                .collect(),
            _ => panic!("vertex {v:?} does not belong to this factor"),
        }
    }

    pub fn degree(&self, v: &FactorVertex) -> usize {
        match (self, v) {
            (Factor::Finite(f), FactorVertex::Index(i)) => f.graph.nbrs(*i).len(),
            (Factor::Tree(t), FactorVertex::Path(_)) => t.degree as usize,
            _ => panic!("vertex {v:?} does not belong to this factor"),
        }
    }

    pub fn distance(&self, x: &FactorVertex, y: &FactorVertex) -> usize {
        match (self, x, y) {
            (Factor::Finite(f), FactorVertex::Index(a), FactorVertex::Index(b)) => f.dist[*a][*b],
            (Factor::Tree(t), FactorVertex::Path(a), FactorVertex::Path(b)) => t.distance(a, b),
            _ => panic!("vertices {x:?}, {y:?} do not belong to this factor"),
        }
    }

    /// All vertices of a finite factor.
    pub fn vertices(&self) -> Option<Vec<FactorVertex>> {
        match self {
            Factor::Finite(f) => Some((0..f.graph.order()).map(FactorVertex::Index).collect()),
            Factor::Tree(_) => None,
        }
    }

    /// Vertices within `radius` of `center`, sorted.
    pub fn vertices_within(&self, center: &FactorVertex, radius: usize) -> Vec<FactorVertex> {
        let mut seen = vec![center.clone()];
        let mut frontier = vec![center.clone()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for v in &frontier {
                for w in self.neighbours(v) {
                    if !seen.contains(&w) {
                        seen.push(w.clone());
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen.sort();
        seen
    }

    pub fn label(&self, v: &FactorVertex) -> String {
        match (self, v) {
            (Factor::Finite(f), FactorVertex::Index(i)) if f.graph.labels().is_some() => {
                f.graph.label(*i)
            }
            _ => v.to_string(),
        }
    }

    pub fn is_labelled(&self) -> bool {
        matches!(self, Factor::Finite(f) if f.graph.labels().is_some())
    }

    /// Resolves a vertex name: a label, a decimal index, or `t` followed by
    /// edge-label digits for tree factors.
    pub fn resolve(&self, name: &str) -> Option<FactorVertex> {
        match self {
            Factor::Finite(f) => f.graph.resolve(name).map(FactorVertex::Index),
            Factor::Tree(t) => {
                let digits = name.strip_prefix('t').unwrap_or(name);
                let path: Option<Vec<u8>> = digits
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8))
                    .collect();
                path.filter(|p| t.contains(p)).map(FactorVertex::Path)
            }
        }
    }
}
