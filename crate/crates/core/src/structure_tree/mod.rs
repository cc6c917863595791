//! The structure tree: graph vertices and sheets, joined by containment.
//!
//! Geodesics in the tree are computed exactly from sheet paths, so the
//! sheet metric and the action of a sheet-preserving automorphism need no
//! window. Windows exist for export and as an independent BFS oracle.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::automorphism::{
    compose, evaluate, invert, is_sheet_preserving, make_sheet_swap, verify_on_ball, AutError,
    AutomorphismSpec,
};
use crate::product::{FactorSystem, ProductError, SheetId, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error("sheet outside the window")]
    SheetOutsideWindow,
    #[error("automorphism is not sheet-preserving on the radius-{0} window")]
    NotSheetPreserving(usize),
    #[error("automorphism fails verification on the radius-{0} ball")]
    NotAnAutomorphism(usize),
    #[error("expected a translation of length 1")]
    NotNormOne,
    #[error("no repeated colour along the axis within {0} steps")]
    NoColourRepeat(usize),
}

impl From<ProductError> for TreeError {
    fn from(e: ProductError) -> Self {
        TreeError::Aut(e.into())
    }
}

/// A vertex of the structure tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum TreeNode {
    Vertex(Word),
    Sheet(SheetId),
}

/// The part of the structure tree spanned by a ball and the sheets meeting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTreeWindow {
    pub radius: usize,
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<(usize, usize)>,
    /// Sheets with anchor within this distance of `∅` are complete.
    pub complete_radius: usize,
    index: HashMap<TreeNode, usize>,
    adjacency: Vec<Vec<usize>>,
}

pub fn build_structure_tree(
    fs: &FactorSystem,
    radius: usize,
) -> Result<StructureTreeWindow, TreeError> {
    let ball = fs.ball(&Word::empty(), radius)?;
    let mut nodes: Vec<TreeNode> = ball
        .vertices
        .iter()
        .cloned()
        .map(TreeNode::Vertex)
        .collect();
    let mut edges = Vec::new();
    for s in &ball.sheets {
        let k = nodes.len();
        nodes.push(TreeNode::Sheet(SheetId {
            anchor: s.anchor.clone(),
            colour: s.colour,
        }));
        edges.extend(s.members.iter().map(|&m| (m, k)));
    }
    let index = nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let mut adjacency = vec![Vec::new(); nodes.len()];
    for &(a, b) in &edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    Ok(StructureTreeWindow {
        radius,
        nodes,
        edges,
        complete_radius: radius.saturating_sub(1),
        index,
        adjacency,
    })
}

impl StructureTreeWindow {
    pub fn index_of(&self, n: &TreeNode) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Tree distances from node `i` by BFS inside the window.
    pub fn distances_from(&self, i: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[i] = Some(0);
        let mut queue = VecDeque::from([i]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued nodes have distances");
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn to_json(&self) -> Value {
        json!({
            "radius": self.radius,
            "complete_radius": self.complete_radius,
            "nodes": self.nodes,
            "edges": self.edges,
        })
    }
}

/// Half the window distance between two sheets.
pub fn sheet_distance(
    tw: &StructureTreeWindow,
    s1: &SheetId,
    s2: &SheetId,
) -> Result<usize, TreeError> {
    let a = tw
        .index_of(&TreeNode::Sheet(s1.clone()))
        .ok_or(TreeError::SheetOutsideWindow)?;
    let b = tw
        .index_of(&TreeNode::Sheet(s2.clone()))
        .ok_or(TreeError::SheetOutsideWindow)?;
    let d = tw.distances_from(a)[b].ok_or(TreeError::SheetOutsideWindow)?;
    Ok(d / 2)
}

fn in_sheet(fs: &FactorSystem, x: &Word, s: &SheetId) -> bool {
    fs.sheet_of(x, s.colour).is_ok_and(|t| t == *s)
}

/// The tree geodesic between two nodes, endpoints included.
pub fn tree_geodesic(
    fs: &FactorSystem,
    a: &TreeNode,
    b: &TreeNode,
) -> Result<Vec<TreeNode>, TreeError> {
    let start = match a {
        TreeNode::Vertex(w) => w.clone(),
        TreeNode::Sheet(s) => s.anchor.clone(),
    };
    let end = match b {
        TreeNode::Vertex(w) => w.clone(),
        TreeNode::Sheet(s) => s.anchor.clone(),
    };
    let mut path = vec![TreeNode::Vertex(start.clone())];
    let mut here = start;
    for step in fs.sheet_path(&here.clone(), &end)? {
        path.push(TreeNode::Sheet(fs.sheet_of(&here, step.colour)?));
        path.push(TreeNode::Vertex(step.to.clone()));
        here = step.to;
    }
    // A sheet endpoint replaces its anchor, absorbing a first step inside it.
    if let TreeNode::Sheet(_) = a {
        if path.len() >= 3 && path[1] == *a {
            path.remove(0);
        } else {
            path.insert(0, a.clone());
        }
    }
    if let TreeNode::Sheet(_) = b {
        let n = path.len();
        if n >= 2 && path[n - 2] == *b {
            path.pop();
        } else {
            path.push(b.clone());
        }
    }
    Ok(path)
}

pub fn tree_distance(fs: &FactorSystem, a: &TreeNode, b: &TreeNode) -> Result<usize, TreeError> {
    Ok(tree_geodesic(fs, a, b)?.len() - 1)
}

/// The sheet metric `d = d′/2`, computed without a window.
pub fn sheet_distance_exact(
    fs: &FactorSystem,
    s1: &SheetId,
    s2: &SheetId,
) -> Result<usize, TreeError> {
    Ok(tree_distance(
        fs,
        &TreeNode::Sheet(s1.clone()),
        &TreeNode::Sheet(s2.clone()),
    )? / 2)
}

/// Two distinct members of a sheet; two members determine the sheet.
fn sheet_pair(fs: &FactorSystem, s: &SheetId) -> Result<(Word, Word), TreeError> {
    let f = fs.factor(s.colour);
    let u = fs.update_vector(&s.anchor)?[s.colour].clone();
    let y = f
        .neighbours(&u)
        .into_iter()
        .next()
        .expect("factors are connected with an edge");
    Ok((
        s.anchor.clone(),
        fs.embed_unchecked(&s.anchor, s.colour, &y),
    ))
}

/// The image of a tree node under a sheet-preserving automorphism.
pub fn act(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    n: &TreeNode,
) -> Result<TreeNode, TreeError> {
    match n {
        TreeNode::Vertex(w) => Ok(TreeNode::Vertex(evaluate(fs, spec, w)?)),
        TreeNode::Sheet(s) => {
            let (a, b) = sheet_pair(fs, s)?;
            let (x, y) = (evaluate(fs, spec, &a)?, evaluate(fs, spec, &b)?);
            for c in 0..fs.n() {
                let t = fs.sheet_of(&x, c)?;
                if in_sheet(fs, &y, &t) {
                    return Ok(TreeNode::Sheet(t));
                }
            }
            Err(TreeError::NotSheetPreserving(0))
        }
    }
}

/// The three types of sheet-preserving automorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Classification {
    SheetInvariant {
        sheet: SheetId,
    },
    VertexFixedNoSheet {
        vertex: Word,
    },
    /// `length` in the sheet metric; `axis` lists consecutive axis sheets.
    Translation {
        length: usize,
        axis: Vec<SheetId>,
    },
    Inconclusive {
        max_radius: usize,
    },
}

impl Classification {
    pub fn norm(&self) -> Option<usize> {
        match self {
            Classification::SheetInvariant { .. } => Some(0),
            Classification::VertexFixedNoSheet { .. } => Some(1),
            Classification::Translation { length, .. } => Some(*length),
            Classification::Inconclusive { .. } => None,
        }
    }

    /// `{type, norm, witness, axis}`.
    pub fn to_json(&self) -> Value {
        let (kind, witness, axis) = match self {
            Classification::SheetInvariant { sheet } => {
                ("sheet_invariant", json!(sheet), Value::Null)
            }
            Classification::VertexFixedNoSheet { vertex } => {
                ("vertex_fixed_no_sheet", json!(vertex), Value::Null)
            }
            Classification::Translation { axis, .. } => {
                ("translation", json!(axis.first()), json!(axis))
            }
            Classification::Inconclusive { max_radius } => (
                "inconclusive",
                json!({ "max_radius": max_radius }),
                Value::Null,
            ),
        };
        json!({ "type": kind, "norm": self.norm(), "witness": witness, "axis": axis })
    }
}

fn sheet(n: &TreeNode) -> Option<&SheetId> {
    match n {
        TreeNode::Sheet(s) => Some(s),
        TreeNode::Vertex(_) => None,
    }
}

/// Classifies a sheet-preserving automorphism by the midpoint of `[∅, α(∅)]`:
/// it is fixed exactly when `α` is elliptic, and lies on the axis otherwise.
/// Sheet preservation and the automorphism property are checked on the
/// radius-`max_radius` ball first.
pub fn norm_and_classify(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    max_radius: usize,
) -> Result<Classification, TreeError> {
    let r = max_radius.max(1);
    if !verify_on_ball(fs, spec, r)?.passed {
        return Err(TreeError::NotAnAutomorphism(r));
    }
    if !is_sheet_preserving(fs, spec, r)?.0 {
        return Err(TreeError::NotSheetPreserving(r));
    }
    let root = TreeNode::Vertex(Word::empty());
    let image = act(fs, spec, &root)?;
    let path = tree_geodesic(fs, &root, &image)?;
    let mid = path[path.len() / 2].clone();
    let mid_image = act(fs, spec, &mid)?;
    if mid_image == mid {
        return Ok(match &mid {
            TreeNode::Sheet(s) => Classification::SheetInvariant { sheet: s.clone() },
            TreeNode::Vertex(v) => {
                // The fixed subtree is convex, so a fixed sheet would have
                // one adjacent to the fixed vertex.
                for c in 0..fs.n() {
                    let s = fs.sheet_of(v, c)?;
                    if act(fs, spec, &TreeNode::Sheet(s.clone()))? == TreeNode::Sheet(s.clone()) {
                        return Ok(Classification::SheetInvariant { sheet: s });
                    }
                }
                Classification::VertexFixedNoSheet { vertex: v.clone() }
            }
        });
    }
    let step = tree_geodesic(fs, &mid, &mid_image)?;
    let l = step.len() - 1;
    let twice = act(fs, spec, &mid_image)?;
    if tree_distance(fs, &mid, &twice)? != 2 * l || l % 2 != 0 {
        return Ok(Classification::Inconclusive { max_radius });
    }
    // The axis through α^{-1}(m), m, α(m), α²(m).
    let inv = invert(fs, spec)?;
    let before = act(fs, &inv, &mid)?;
    let mut axis_nodes = tree_geodesic(fs, &before, &mid)?;
    axis_nodes.pop();
    axis_nodes.extend(tree_geodesic(fs, &mid, &twice)?);
    let axis: Vec<SheetId> = axis_nodes.iter().filter_map(sheet).cloned().collect();
    Ok(Classification::Translation {
        length: l / 2,
        axis,
    })
}

/// For a translation `α` of length 1, returns `(σ, β)` with `β` a sheet
/// swap fixing a vertex, `σ = α ∘ β` leaving a sheet invariant, and
/// `σ ∘ β = α`.
pub fn decompose_norm_one(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    max_radius: usize,
) -> Result<(AutomorphismSpec, AutomorphismSpec), TreeError> {
    let Classification::Translation { length: 1, axis } = norm_and_classify(fs, spec, max_radius)?
    else {
        return Err(TreeError::NotNormOne);
    };
    let s0 = axis[0].clone();
    // γ(k) = α^k(S), all of colour i_k; find the first repeat of i_0.
    let mut gamma = vec![s0.clone()];
    let limit = fs.n() + 1;
    let l = loop {
        let next = act(
            fs,
            spec,
            &TreeNode::Sheet(gamma.last().expect("non-empty").clone()),
        )?;
        let next = sheet(&next).expect("sheets map to sheets").clone();
        let repeat = next.colour == s0.colour;
        gamma.push(next);
        if repeat {
            break gamma.len() - 1;
        }
        if gamma.len() > limit {
            return Err(TreeError::NoColourRepeat(limit));
        }
    };
    let (i0, i1) = (gamma[0].colour, gamma[1].colour);
    let v = meet(fs, &gamma[0], &gamma[1])?;
    // φ = coordinate in colour i₁ ∘ α^{-(l-1)} ∘ embedding at α^{l-1}(v).
    let inv = invert(fs, spec)?;
    let mut shifted = v.clone();
    for _ in 0..l - 1 {
        shifted = evaluate(fs, spec, &shifted)?;
    }
    let target = fs.sheet_of(&shifted, i0)?;
    let members = fs.sheet_vertices(&target, None)?;
    let order = members.len();
    let mut phi = vec![0; order];
    for z in members {
        let y = index_of(&fs.update_vector(&z)?[i0]);
        let mut back = z;
        for _ in 0..l - 1 {
            back = evaluate(fs, &inv, &back)?;
        }
        phi[y] = index_of(&fs.update_vector(&back)?[i1]);
    }
    let beta = make_sheet_swap(fs, v, i0, i1, phi)?;
    let sigma = compose(spec.clone(), beta.clone());
    Ok((sigma, beta))
}

fn index_of(v: &crate::product::FactorVertex) -> usize {
    v.index().expect("sheet swaps need finite factors")
}

/// The common vertex of two adjacent sheets.
fn meet(fs: &FactorSystem, a: &SheetId, b: &SheetId) -> Result<Word, TreeError> {
    let path = tree_geodesic(fs, &TreeNode::Sheet(a.clone()), &TreeNode::Sheet(b.clone()))?;
    match path.as_slice() {
        [_, TreeNode::Vertex(v), _] => Ok(v.clone()),
        _ => Err(TreeError::NotNormOne),
    }
}
