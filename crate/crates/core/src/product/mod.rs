//! The free product of connected graphs as a lazy infinite graph.
//!
//! A vertex is an admissible word `v₁…v_l`; the update vector `u(ṽ)` records
//! the current position in every factor. Each vertex lies in exactly one
//! sheet (a copy of `Γ_j`) per colour `j`, and every edge lies in exactly one
//! sheet. Colours and factor indices are 0-based.

mod ball;
mod factor;
mod mashup;
mod word;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{FiniteGraph, GraphError};

pub use ball::{enumerate_ball, Ball, BallEdge, BallJson, BallSheet, LazyGraph, DEFAULT_CAP};
pub use factor::{Factor, FactorVertex, FiniteFactor, TreeFactor};
pub use mashup::{
    quotient_map_psi, reanchor, transport, CartesianProduct, GraphProduct, Mashup, Reanchored,
};
pub use word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("a free product needs at least one factor")]
    NoFactors,
    #[error("factor {0} is a single vertex")]
    TrivialFactor(usize),
    #[error("factor {0} is not connected")]
    DisconnectedFactor(usize),
    #[error("initial vector has {got} entries for {expected} factors")]
    InitLength { expected: usize, got: usize },
    #[error("initial vertex {vertex} is not a vertex of factor {factor}")]
    InvalidInit { factor: usize, vertex: FactorVertex },
    #[error("letter {position} does not name a vertex of an existing factor")]
    InvalidLetter { position: usize },
    #[error("word {word} is not admissible (fails at letter {position})")]
    Inadmissible { word: String, position: usize },
    #[error("colour {0} is out of range")]
    ColourOutOfRange(usize),
    #[error("factor {0} must be finite here")]
    NeedsFiniteFactor(usize),
    #[error("ball exceeds the cap of {cap} vertices ({partial} enumerated)")]
    CapExceeded { cap: usize, partial: usize },
    #[error("target basepoint has coordinates {target:?}, expected {expected:?}")]
    MismatchedInit {
        expected: Vec<FactorVertex>,
        target: Vec<FactorVertex>,
    },
    #[error("commutation graph has {got} vertices for {expected} factors")]
    BaseGraphSize { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Identifies the `Γ_colour`-sheet through a vertex by its shortest word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SheetId {
    pub anchor: Word,
    pub colour: usize,
}

/// One move of a sheet path: travel inside a `colour`-sheet to `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetStep {
    pub colour: usize,
    pub to: Word,
}

/// Factors together with the initial update vector `u(∅)`.
#[derive(Debug, Clone)]
pub struct FactorSystem {
    factors: Arc<Vec<Factor>>,
    init: Vec<FactorVertex>,
}

impl FactorSystem {
    pub fn new(factors: Vec<Factor>, init: Vec<FactorVertex>) -> Result<Self, ProductError> {
        if factors.is_empty() {
            return Err(ProductError::NoFactors);
        }
        for (i, f) in factors.iter().enumerate() {
            if !f.is_connected() {
                return Err(ProductError::DisconnectedFactor(i));
            }
            if matches!(f.order(), Some(n) if n < 2)
                || matches!(f, Factor::Tree(t) if t.degree == 0)
            {
                return Err(ProductError::TrivialFactor(i));
            }
        }
        let fs = FactorSystem {
            factors: Arc::new(factors),
            init: Vec::new(),
        };
        fs.with_init(init)
    }

    /// Finite factors with initial vertex indices.
    pub fn from_graphs(graphs: Vec<FiniteGraph>, init: &[usize]) -> Result<Self, ProductError> {
        Self::new(
            graphs.into_iter().map(Factor::finite).collect(),
            init.iter().map(|&v| FactorVertex::Index(v)).collect(),
        )
    }

    /// The same factors with another initial vector.
    pub fn with_init(&self, init: Vec<FactorVertex>) -> Result<Self, ProductError> {
        if init.len() != self.factors.len() {
            return Err(ProductError::InitLength {
                expected: self.factors.len(),
                got: init.len(),
            });
        }
        for (i, v) in init.iter().enumerate() {
            if !self.factors[i].contains(v) {
                return Err(ProductError::InvalidInit {
                    factor: i,
                    vertex: v.clone(),
                });
            }
        }
        Ok(FactorSystem {
            factors: Arc::clone(&self.factors),
            init,
        })
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Factor {
        &self.factors[i]
    }

    pub fn init(&self) -> &[FactorVertex] {
        &self.init
    }

    /// The graph of factor `i`, or an error for tree factors.
    pub fn finite_factor(&self, i: usize) -> Result<&FiniteGraph, ProductError> {
        self.check_colour(i)?;
        self.factors[i]
            .graph()
            .ok_or(ProductError::NeedsFiniteFactor(i))
    }

    pub(crate) fn check_colour(&self, j: usize) -> Result<(), ProductError> {
        if j < self.n() {
            Ok(())
        } else {
            Err(ProductError::ColourOutOfRange(j))
        }
    }

    /// One left-to-right pass: `Ok(None)` if admissible, `Ok(Some(k))` if
    /// letter `k` breaks admissibility.
    fn first_violation(&self, w: &Word) -> Result<Option<usize>, ProductError> {
        let mut u = self.init.clone();
        let mut prev: Option<usize> = None;
        for (k, l) in w.letters().iter().enumerate() {
            if l.factor >= self.n() || !self.factors[l.factor].contains(&l.vertex) {
                return Err(ProductError::InvalidLetter { position: k });
            }
            if prev == Some(l.factor) || u[l.factor] == l.vertex {
                return Ok(Some(k));
            }
            u[l.factor] = l.vertex.clone();
            prev = Some(l.factor);
        }
        Ok(None)
    }

    pub fn is_admissible(&self, w: &Word) -> Result<bool, ProductError> {
        Ok(self.first_violation(w)?.is_none())
    }

    pub fn check_admissible(&self, w: &Word) -> Result<(), ProductError> {
        match self.first_violation(w)? {
            None => Ok(()),
            Some(position) => Err(ProductError::Inadmissible {
                word: self.word_text(w),
                position,
            }),
        }
    }

    /// `u(ṽ)` for a word already known to be admissible.
    pub(crate) fn u_unchecked(&self, w: &Word) -> Vec<FactorVertex> {
        let mut u = self.init.clone();
        for l in w.letters() {
            u[l.factor] = l.vertex.clone();
        }
        u
    }

    /// `u_j(ṽ)`: the last letter of `ṽ` from factor `j`, or `init[j]`.
    pub(crate) fn coord_unchecked(&self, w: &Word, j: usize) -> FactorVertex {
        w.letters()
            .iter()
            .rev()
            .find(|l| l.factor == j)
            .map_or_else(|| self.init[j].clone(), |l| l.vertex.clone())
    }

    pub fn update_vector(&self, w: &Word) -> Result<Vec<FactorVertex>, ProductError> {
        self.check_admissible(w)?;
        Ok(self.u_unchecked(w))
    }

    /// Neighbours of `ṽ` with the colour of the connecting edge, sorted by
    /// colour and then by the neighbour's coordinate in that colour.
    pub fn neighbours(&self, w: &Word) -> Result<Vec<(Word, usize)>, ProductError> {
        self.check_admissible(w)?;
        Ok(self.neighbours_unchecked(w))
    }

    pub(crate) fn neighbours_unchecked(&self, w: &Word) -> Vec<(Word, usize)> {
        let mut out = Vec::new();
        for j in 0..self.n() {
            let anchor = self.anchor_unchecked(w, j);
            let base = self.coord_unchecked(&anchor, j);
            let here = self.coord_unchecked(w, j);
            for y in self.factors[j].neighbours(&here) {
                let next = if y == base {
                    anchor.clone()
                } else {
                    anchor.pushed(Letter {
                        factor: j,
                        vertex: y,
                    })
                };
                out.push((next, j));
            }
        }
        out
    }

    fn anchor_unchecked(&self, w: &Word, j: usize) -> Word {
        if w.last_factor() == Some(j) {
            w.popped()
        } else {
            w.clone()
        }
    }

    pub fn sheet_of(&self, w: &Word, j: usize) -> Result<SheetId, ProductError> {
        self.check_colour(j)?;
        self.check_admissible(w)?;
        Ok(SheetId {
            anchor: self.anchor_unchecked(w, j),
            colour: j,
        })
    }

    /// `φ_(x,j)(y)`: the vertex of the `j`-sheet at `x` whose `j`-coordinate is `y`.
    pub(crate) fn embed_unchecked(&self, x: &Word, j: usize, y: &FactorVertex) -> Word {
        let anchor = self.anchor_unchecked(x, j);
        if *y == self.coord_unchecked(&anchor, j) {
            anchor
        } else {
            anchor.pushed(Letter {
                factor: j,
                vertex: y.clone(),
            })
        }
    }

    /// Members of a sheet in the order of the factor's vertices. Tree factors
    /// need `window`, the radius around the anchor's coordinate.
    pub fn sheet_vertices(
        &self,
        s: &SheetId,
        window: Option<usize>,
    ) -> Result<Vec<Word>, ProductError> {
        self.check_colour(s.colour)?;
        self.check_admissible(&s.anchor)?;
        if s.anchor.last_factor() == Some(s.colour) {
            return Err(ProductError::Inadmissible {
                word: self.word_text(&s.anchor),
                position: s.anchor.len() - 1,
            });
        }
        let f = &self.factors[s.colour];
        let base = self.coord_unchecked(&s.anchor, s.colour);
        let verts = match (f.vertices(), window) {
            (Some(v), _) => v,
            (None, Some(r)) => f.vertices_within(&base, r),
            (None, None) => return Err(ProductError::NeedsFiniteFactor(s.colour)),
        };
        Ok(verts
            .iter()
            .map(|y| self.embed_unchecked(&s.anchor, s.colour, y))
            .collect())
    }

    /// Moves between consecutive entries stay inside one sheet, and
    /// consecutive sheets differ. This is the geodesic in the structure tree.
    pub fn sheet_path(&self, a: &Word, b: &Word) -> Result<Vec<SheetStep>, ProductError> {
        self.check_admissible(a)?;
        self.check_admissible(b)?;
        Ok(self.sheet_path_unchecked(a, b))
    }

    pub(crate) fn sheet_path_unchecked(&self, a: &Word, b: &Word) -> Vec<SheetStep> {
        let p = a.common_prefix_len(b);
        let mut steps = Vec::new();
        for t in (p + 1..=a.len()).rev() {
            steps.push(SheetStep {
                colour: a.letters()[t - 1].factor,
                to: a.prefix(t - 1),
            });
        }
        for t in p + 1..=b.len() {
            let colour = b.letters()[t - 1].factor;
            let to = b.prefix(t);
            // Leaving through the anchor and re-entering the same sheet merges.
            if t == p + 1 && a.len() > p && a.letters()[p].factor == colour {
                let last = steps.last_mut().expect("an upward step exists");
                last.to = to;
            } else {
                steps.push(SheetStep { colour, to });
            }
        }
        steps
    }

    /// Graph distance as the sum of factor distances along the sheet path.
    pub fn distance(&self, a: &Word, b: &Word) -> Result<usize, ProductError> {
        let path = self.sheet_path(a, b)?;
        let mut total = 0;
        let mut here = a.clone();
        for step in path {
            let f = &self.factors[step.colour];
            total += f.distance(
                &self.coord_unchecked(&here, step.colour),
                &self.coord_unchecked(&step.to, step.colour),
            );
            here = step.to;
        }
        Ok(total)
    }

    /// The vertices where every geodesic from `a` to `b` changes sheet.
    pub fn transition_points(&self, a: &Word, b: &Word) -> Result<Vec<Word>, ProductError> {
        let mut path = self.sheet_path(a, b)?;
        path.pop();
        Ok(path.into_iter().map(|s| s.to).collect())
    }

    /// Human-readable word: concatenated labels when every factor is
    /// labelled, `factor:vertex` tokens otherwise.
    pub fn word_text(&self, w: &Word) -> String {
        if w.is_empty() {
            return "∅".into();
        }
        let labelled = self.factors.iter().all(Factor::is_labelled);
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|l| match self.factors.get(l.factor) {
                Some(f) if labelled => f.label(&l.vertex),
                _ => format!("{}:{}", l.factor, l.vertex),
            })
            .collect();
        parts.join(if labelled { "" } else { " " })
    }

    /// Parses a word written as labels separated by spaces or commas, each
    /// resolved in the first factor that knows it.
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        let mut letters = Vec::new();
        for tok in text.split([' ', ',']).filter(|t| !t.is_empty()) {
            if let Some((f, v)) = tok.split_once(':') {
                let i: usize = f.parse().ok()?;
                letters.push(Letter {
                    factor: i,
                    vertex: self.factors.get(i)?.resolve(v)?,
                });
                continue;
            }
            let (i, v) = self
                .factors
                .iter()
                .enumerate()
                .find_map(|(i, f)| f.resolve(tok).map(|v| (i, v)))?;
            letters.push(Letter {
                factor: i,
                vertex: v,
            });
        }
        Some(Word(letters))
    }

    /// The radius-`radius` ball around `center`.
    pub fn ball(&self, center: &Word, radius: usize) -> Result<Ball<Word>, ProductError> {
        self.ball_with_cap(center, radius, DEFAULT_CAP)
    }

    pub fn ball_with_cap(
        &self,
        center: &Word,
        radius: usize,
        cap: usize,
    ) -> Result<Ball<Word>, ProductError> {
        self.check_admissible(center)?;
        enumerate_ball(self, center.clone(), radius, cap)
    }
}

impl LazyGraph for FactorSystem {
    type Vertex = Word;

    fn colours(&self) -> usize {
        self.n()
    }

    fn lazy_neighbours(&self, v: &Word) -> Result<Vec<(Word, usize)>, ProductError> {
        Ok(self.neighbours_unchecked(v))
    }

    fn sheet_anchor(&self, v: &Word, colour: usize) -> Option<Word> {
        Some(self.anchor_unchecked(v, colour))
    }
}
