//! Three older free-product constructions as ball generators, and rooted
//! ball comparison against the word construction.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    connected_sum, find_isomorphism, is_vertex_transitive, FiniteGraph, GraphError, RootedGraph,
};
use crate::product::{
    enumerate_ball, Ball, FactorSystem, LazyGraph, Letter, ProductError, Word, DEFAULT_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("factor {0} is not vertex-transitive")]
    NotVertexTransitive(usize),
    #[error("expected {expected} factors, got {got}")]
    FactorCount { expected: usize, got: usize },
    #[error("root {root} is not a vertex of factor {factor}")]
    BadRoot { factor: usize, root: usize },
    #[error("balls have radii {a} and {b}")]
    RadiusMismatch { a: usize, b: usize },
}

/// A finite graph seen as a lazy graph with a single colour.
impl LazyGraph for FiniteGraph {
    type Vertex = usize;

    fn colours(&self) -> usize {
        1
    }

    fn lazy_neighbours(&self, v: &usize) -> Result<Vec<(usize, usize)>, ProductError> {
        Ok(self.neighbours(*v)?.iter().map(|&w| (w, 0)).collect())
    }
}

/// How the copies' vertices are matched with the edges at a tree vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortPolicy {
    /// Vertex `x` sits at port `x`.
    Sorted,
    /// Vertex `x` sits at port `deg − 1 − x`.
    Reverse,
}

/// A vertex of the biregular tree: a side of the base edge, then a port at
/// each step away from it. Port 0 always leads back towards the base edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreeVertex {
    pub side: u8,
    pub ports: Vec<usize>,
}

/// A vertex of the edge-indexed product: the tree edge above `lower`, or the
/// base edge when `lower.ports` is empty (then `side` is 0).
pub type MswzVertex = TreeVertex;

/// The product whose vertices are the edges of the `(m, n)`-biregular tree,
/// with a copy of `Γ₁` at each degree-`m` vertex and of `Γ₂` at each
/// degree-`n` vertex.
#[derive(Debug, Clone)]
pub struct MswzSystem {
    factors: [FiniteGraph; 2],
    policy: PortPolicy,
}

impl MswzSystem {
    pub fn new(g1: FiniteGraph, g2: FiniteGraph, policy: PortPolicy) -> Result<Self, EquivError> {
        for (i, g) in [&g1, &g2].into_iter().enumerate() {
            if !is_vertex_transitive(g)? {
                return Err(EquivError::NotVertexTransitive(i));
            }
        }
        Ok(MswzSystem {
            factors: [g1, g2],
            policy,
        })
    }

    fn kind(t: &TreeVertex) -> usize {
        (t.side as usize + t.ports.len()) % 2
    }

    fn degree(&self, t: &TreeVertex) -> usize {
        self.factors[Self::kind(t)].order()
    }

    fn vertex_at(&self, t: &TreeVertex, port: usize) -> usize {
        match self.policy {
            PortPolicy::Sorted => port,
            PortPolicy::Reverse => self.degree(t) - 1 - port,
        }
    }

    fn port_of(&self, t: &TreeVertex, x: usize) -> usize {
        // Both policies are involutions.
        self.vertex_at(t, x)
    }

    fn edge_at(t: &TreeVertex, port: usize) -> MswzVertex {
        if port > 0 {
            let mut ports = t.ports.clone();
            ports.push(port);
            return TreeVertex {
                side: t.side,
                ports,
            };
        }
        if t.ports.is_empty() {
            base_edge()
        } else {
            t.clone()
        }
    }

    /// The two endpoints of an edge with the port the edge occupies at each.
    fn endpoints(e: &MswzVertex) -> [(TreeVertex, usize); 2] {
        if e.ports.is_empty() {
            return [
                (
                    TreeVertex {
                        side: 0,
                        ports: vec![],
                    },
                    0,
                ),
                (
                    TreeVertex {
                        side: 1,
                        ports: vec![],
                    },
                    0,
                ),
            ];
        }
        let parent = TreeVertex {
            side: e.side,
            ports: e.ports[..e.ports.len() - 1].to_vec(),
        };
        [
            (e.clone(), 0),
            (parent, *e.ports.last().expect("non-empty")),
        ]
    }

    pub fn ball(&self, radius: usize) -> Result<Ball<MswzVertex>, EquivError> {
        Ok(enumerate_ball(self, base_edge(), radius, DEFAULT_CAP)?)
    }
}

fn base_edge() -> MswzVertex {
    TreeVertex {
        side: 0,
        ports: vec![],
    }
}

impl LazyGraph for MswzSystem {
    type Vertex = MswzVertex;

    fn colours(&self) -> usize {
        2
    }

    fn lazy_neighbours(&self, e: &MswzVertex) -> Result<Vec<(MswzVertex, usize)>, ProductError> {
        let mut out = Vec::new();
        for (t, port) in Self::endpoints(e) {
            let k = Self::kind(&t);
            let p = self.vertex_at(&t, port);
            for &q in self.factors[k].neighbours(p)? {
                out.push((Self::edge_at(&t, self.port_of(&t, q)), k));
            }
        }
        Ok(out)
    }
}

/// Rooted factors for the word constructions with frozen roots.
#[derive(Debug, Clone)]
pub struct RootedFactors {
    graphs: Vec<FiniteGraph>,
    roots: Vec<usize>,
}

impl RootedFactors {
    pub fn new(graphs: Vec<FiniteGraph>, roots: Vec<usize>) -> Result<Self, EquivError> {
        if graphs.len() != roots.len() || graphs.len() < 2 {
            return Err(EquivError::FactorCount {
                expected: graphs.len().max(2),
                got: roots.len(),
            });
        }
        for (i, (g, &r)) in graphs.iter().zip(&roots).enumerate() {
            if r >= g.order() {
                return Err(EquivError::BadRoot { factor: i, root: r });
            }
        }
        Ok(RootedFactors { graphs, roots })
    }

    pub fn graphs(&self) -> &[FiniteGraph] {
        &self.graphs
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }
}

/// Words of non-root letters from alternating factors: append a neighbour
/// of a root, or move the last letter along an edge of its factor.
#[derive(Debug, Clone)]
pub struct PtSystem(pub RootedFactors);

impl PtSystem {
    pub fn ball(&self, radius: usize) -> Result<Ball<Word>, EquivError> {
        Ok(enumerate_ball(self, Word::empty(), radius, DEFAULT_CAP)?)
    }
}

impl LazyGraph for PtSystem {
    type Vertex = Word;

    fn colours(&self) -> usize {
        self.0.graphs.len()
    }

    fn lazy_neighbours(&self, w: &Word) -> Result<Vec<(Word, usize)>, ProductError> {
        let RootedFactors { graphs, roots } = &self.0;
        let mut out = Vec::new();
        let last = w.last_factor();
        if let Some(l) = w.last() {
            let i = l.factor;
            let x = l.vertex.index().expect("finite letters");
            let u = w.popped();
            if graphs[i].has_edge(roots[i], x) {
                out.push((u.clone(), i));
            }
            for &y in graphs[i].neighbours(x)? {
                if y != roots[i] {
                    out.push((u.pushed(Letter::new(i, y)), i));
                }
            }
        }
        for k in (0..graphs.len()).filter(|&k| Some(k) != last) {
            for &z in graphs[k].neighbours(roots[k])? {
                out.push((w.pushed(Letter::new(k, z)), k));
            }
        }
        Ok(out)
    }
}

/// The recursive connected sum truncated at `depth` levels of attachment.
/// Attachments below level `r` lie outside the radius-`r` ball of the root,
/// so `depth = r` reproduces that ball exactly.
#[derive(Debug, Clone)]
pub struct QuenellSystem(pub RootedFactors);

impl QuenellSystem {
    /// `B_i`: `Γ_i` with a copy of every other `B_k` glued at each non-root vertex.
    fn block(
        &self,
        i: usize,
        depth: usize,
        memo: &mut HashMap<(usize, usize), FiniteGraph>,
    ) -> FiniteGraph {
        if let Some(g) = memo.get(&(i, depth)) {
            return g.clone();
        }
        let RootedFactors { graphs, roots } = &self.0;
        let mut g = graphs[i].clone();
        if depth > 0 {
            for v in (0..graphs[i].order()).filter(|&v| v != roots[i]) {
                for k in (0..graphs.len()).filter(|&k| k != i) {
                    let sub = self.block(k, depth - 1, memo);
                    let a = RootedGraph::new(g, v).expect("vertex of the block");
                    let b = RootedGraph::new(sub, roots[k]).expect("root of the block");
                    g = connected_sum(&a, &b).graph;
                }
            }
        }
        memo.insert((i, depth), g.clone());
        g
    }

    /// The truncated graph and its root.
    pub fn truncated(&self, depth: usize) -> (FiniteGraph, usize) {
        let mut memo = HashMap::new();
        let roots = &self.0.roots;
        let mut g = self.block(0, depth, &mut memo);
        for k in 1..self.0.graphs.len() {
            let a = RootedGraph::new(g, roots[0]).expect("root of the first block");
            let b = RootedGraph::new(self.block(k, depth, &mut memo), roots[k])
                .expect("root of the block");
            g = connected_sum(&a, &b).graph;
        }
        (g, roots[0])
    }

    pub fn ball(&self, radius: usize) -> Result<Ball<usize>, EquivError> {
        let (g, root) = self.truncated(radius);
        Ok(enumerate_ball(&g, root, radius, DEFAULT_CAP)?)
    }
}

/// A centre-pinned, colour-blind isomorphism between two balls of equal radius.
pub fn rooted_ball_isomorphic<A, B>(
    a: &Ball<A>,
    b: &Ball<B>,
) -> Result<Option<Vec<usize>>, EquivError>
where
    A: Clone + Eq + std::hash::Hash + Ord + std::fmt::Debug,
    B: Clone + Eq + std::hash::Hash + Ord + std::fmt::Debug,
{
    if a.radius != b.radius {
        return Err(EquivError::RadiusMismatch {
            a: a.radius,
            b: b.radius,
        });
    }
    if degree_shells(a) != degree_shells(b) {
        return Ok(None);
    }
    Ok(find_isomorphism(&a.to_graph(), &b.to_graph(), &[(0, 0)])?)
}

/// Sorted in-ball degrees per distance shell.
pub fn degree_shells<V>(ball: &Ball<V>) -> Vec<Vec<usize>>
where
    V: Clone + Eq + std::hash::Hash + Ord + std::fmt::Debug,
{
    let mut shells = vec![Vec::new(); ball.radius + 1];
    for i in 0..ball.len() {
        shells[ball.dist[i]].push(ball.adjacent(i).len());
    }
    for s in &mut shells {
        s.sort_unstable();
    }
    shells
}

/// The four constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definition {
    Words,
    Mswz,
    PisanskiTucker,
    Quenell,
}

impl Definition {
    pub const ALL: [Definition; 4] = [
        Definition::Words,
        Definition::Mswz,
        Definition::PisanskiTucker,
        Definition::Quenell,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonReport {
    pub definition_a: Definition,
    pub definition_b: Definition,
    pub radius: usize,
    pub isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<Vec<usize>>,
}

/// A ball of one construction, as an uncoloured graph with the centre at 0.
#[derive(Debug, Clone)]
pub struct DefinitionBall {
    pub definition: Definition,
    pub ball: Ball<usize>,
}

fn reindex<V>(ball: &Ball<V>) -> Ball<usize>
where
    V: Clone + Eq + std::hash::Hash + Ord + std::fmt::Debug,
{
    let g = ball.to_graph();
    enumerate_ball(&g, 0, ball.radius, usize::MAX).expect("finite graph balls fit")
}

/// Builds the radius-`radius` ball of `definition` on two rooted factors.
/// The word construction is initialised at the roots; the edge-indexed one
/// ignores the roots and needs vertex-transitive factors.
pub fn definition_ball(
    definition: Definition,
    rooted: &RootedFactors,
    radius: usize,
    policy: PortPolicy,
) -> Result<DefinitionBall, EquivError> {
    let ball = match definition {
        Definition::Words => {
            let fs = FactorSystem::from_graphs(rooted.graphs.clone(), &rooted.roots)?;
            reindex(&fs.ball(&Word::empty(), radius)?)
        }
        Definition::Mswz => {
            if rooted.graphs.len() != 2 {
                return Err(EquivError::FactorCount {
                    expected: 2,
                    got: rooted.graphs.len(),
                });
            }
            let sys = MswzSystem::new(rooted.graphs[0].clone(), rooted.graphs[1].clone(), policy)?;
            reindex(&sys.ball(radius)?)
        }
        Definition::PisanskiTucker => reindex(&PtSystem(rooted.clone()).ball(radius)?),
        Definition::Quenell => reindex(&QuenellSystem(rooted.clone()).ball(radius)?),
    };
    Ok(DefinitionBall { definition, ball })
}

/// Pairwise comparison of the given constructions.
pub fn compare_definitions(
    rooted: &RootedFactors,
    definitions: &[Definition],
    radius: usize,
) -> Result<Vec<ComparisonReport>, EquivError> {
    let balls: Vec<DefinitionBall> = definitions
        .iter()
        .map(|&d| definition_ball(d, rooted, radius, PortPolicy::Sorted))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let mapping = rooted_ball_isomorphic(&balls[i].ball, &balls[j].ball)?;
            out.push(ComparisonReport {
                definition_a: balls[i].definition,
                definition_b: balls[j].definition,
                radius,
                isomorphic: mapping.is_some(),
                mapping,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
