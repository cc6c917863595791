use std::fmt;

use serde::{Deserialize, Serialize};

use super::FactorVertex;

/// One letter of a word: a vertex of factor `factor`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, FactorVertex)", into = "(usize, FactorVertex)")]
pub struct Letter {
    pub factor: usize,
    pub vertex: FactorVertex,
}

impl Letter {
    pub fn new(factor: usize, vertex: impl Into<FactorVertex>) -> Self {
        Letter {
            factor,
            vertex: vertex.into(),
        }
    }
}

impl From<(usize, FactorVertex)> for Letter {
    fn from((factor, vertex): (usize, FactorVertex)) -> Self {
        Letter { factor, vertex }
    }
}

impl From<Letter> for (usize, FactorVertex) {
    fn from(l: Letter) -> Self {
        (l.factor, l.vertex)
    }
}

/// A word over the disjoint union of the factor vertex sets. Words compare
/// lexicographically letter by letter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word over finite factors from `(factor, vertex index)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Word(pairs.iter().map(|&(i, v)| Letter::new(i, v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn last(&self) -> Option<&Letter> {
        self.0.last()
    }

    /// Factor of the last letter.
    pub fn last_factor(&self) -> Option<usize> {
        self.0.last().map(|l| l.factor)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn pushed(&self, letter: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn popped(&self) -> Word {
        let mut v = self.0.clone();
        v.pop();
        Word(v)
    }

    pub fn has_prefix(&self, p: &Word) -> bool {
        self.0.starts_with(&p.0)
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", l.factor, l.vertex)?;
        }
        Ok(())
    }
}
