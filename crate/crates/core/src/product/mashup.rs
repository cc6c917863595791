//! Mashups: graphs covered by embedded factor copies, and the morphisms
//! out of the free product into them.

use std::sync::Arc;

use super::{Factor, FactorSystem, FactorVertex, LazyGraph, Letter, ProductError, Word};
use crate::graph::FiniteGraph;

/// A graph with, at every vertex `x` and colour `j`, an embedding
/// `φ_(x,j)` of factor `j` whose image is the `j`-sheet through `x`.
pub trait Mashup: LazyGraph {
    fn factor_list(&self) -> &[Factor];

    /// `φ⁻¹_(x,j)(x)`: the position of `x` inside its `j`-sheet.
    fn coordinate(&self, x: &Self::Vertex, j: usize) -> FactorVertex;

    /// `φ_(x,j)(y)`: the vertex of the `j`-sheet through `x` at position `y`.
    fn embed(&self, x: &Self::Vertex, j: usize, y: &FactorVertex) -> Self::Vertex;

    fn validate(&self, x: &Self::Vertex) -> Result<(), ProductError>;

    fn coordinates(&self, x: &Self::Vertex) -> Vec<FactorVertex> {
        (0..self.factor_list().len())
            .map(|j| self.coordinate(x, j))
            .collect()
    }
}

impl Mashup for FactorSystem {
    fn factor_list(&self) -> &[Factor] {
        self.factors()
    }

    fn coordinate(&self, x: &Word, j: usize) -> FactorVertex {
        self.coord_unchecked(x, j)
    }

    fn embed(&self, x: &Word, j: usize, y: &FactorVertex) -> Word {
        self.embed_unchecked(x, j, y)
    }

    fn validate(&self, x: &Word) -> Result<(), ProductError> {
        self.check_admissible(x)
    }
}

/// The morphism from `src` into `target` sending `src_base ↦ target_base`
/// and each sheet of `src` onto the matching sheet of `target`, evaluated
/// at `w` by walking the sheet path from `src_base`.
pub fn transport<M: Mashup>(
    src: &FactorSystem,
    src_base: &Word,
    target: &M,
    target_base: &M::Vertex,
    w: &Word,
) -> Result<M::Vertex, ProductError> {
    target.validate(target_base)?;
    let expected = src.update_vector(src_base)?;
    let got = target.coordinates(target_base);
    if expected != got {
        return Err(ProductError::MismatchedInit {
            expected,
            target: got,
        });
    }
    let mut z = target_base.clone();
    for step in src.sheet_path(src_base, w)? {
        let y = src.coord_unchecked(&step.to, step.colour);
        z = target.embed(&z, step.colour, &y);
    }
    Ok(z)
}

/// `ψ(ṽ)` for the morphism `ψ: Γ → target` with `ψ(∅) = x₀`.
pub fn quotient_map_psi<M: Mashup>(
    fs: &FactorSystem,
    target: &M,
    x0: &M::Vertex,
    w: &Word,
) -> Result<M::Vertex, ProductError> {
    transport(fs, &Word::empty(), target, x0, w)
}

/// The free product initialised at `u(base)`, identified with the original
/// one by the isomorphism sending its `∅` to `base`.
#[derive(Debug, Clone)]
pub struct Reanchored {
    pub original: FactorSystem,
    pub system: FactorSystem,
    pub base: Word,
}

impl Reanchored {
    /// Image in the original system of a word of the reanchored one.
    pub fn forward(&self, w: &Word) -> Result<Word, ProductError> {
        transport(&self.system, &Word::empty(), &self.original, &self.base, w)
    }

    /// Preimage in the reanchored system of a word of the original one.
    pub fn backward(&self, w: &Word) -> Result<Word, ProductError> {
        transport(&self.original, &self.base, &self.system, &Word::empty(), w)
    }
}

pub fn reanchor(fs: &FactorSystem, new_base: &Word) -> Result<Reanchored, ProductError> {
    let system = fs.with_init(fs.update_vector(new_base)?)?;
    Ok(Reanchored {
        original: fs.clone(),
        system,
        base: new_base.clone(),
    })
}

/// The cartesian product of the factors; vertices are coordinate tuples.
#[derive(Debug, Clone)]
pub struct CartesianProduct {
    factors: Arc<Vec<Factor>>,
}

impl CartesianProduct {
    pub fn new(factors: Vec<Factor>) -> Self {
        CartesianProduct {
            factors: Arc::new(factors),
        }
    }

    pub fn of(fs: &FactorSystem) -> Self {
        Self::new(fs.factors().to_vec())
    }

    pub fn ball(
        &self,
        center: &[FactorVertex],
        radius: usize,
        cap: usize,
    ) -> Result<super::Ball<Vec<FactorVertex>>, ProductError> {
        self.validate(&center.to_vec())?;
        super::enumerate_ball(self, center.to_vec(), radius, cap)
    }
}

impl LazyGraph for CartesianProduct {
    type Vertex = Vec<FactorVertex>;

    fn colours(&self) -> usize {
        self.factors.len()
    }

    fn lazy_neighbours(
        &self,
        x: &Vec<FactorVertex>,
    ) -> Result<Vec<(Vec<FactorVertex>, usize)>, ProductError> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            for y in f.neighbours(&x[i]) {
                let mut z = x.clone();
                z[i] = y;
                out.push((z, i));
            }
        }
        Ok(out)
    }

    fn sheet_anchor(&self, x: &Vec<FactorVertex>, colour: usize) -> Option<Vec<FactorVertex>> {
        let mut z = x.clone();
        z[colour] = self.factors[colour].base_vertex();
        Some(z)
    }
}

impl Mashup for CartesianProduct {
    fn factor_list(&self) -> &[Factor] {
        &self.factors
    }

    fn coordinate(&self, x: &Vec<FactorVertex>, j: usize) -> FactorVertex {
        x[j].clone()
    }

    fn embed(&self, x: &Vec<FactorVertex>, j: usize, y: &FactorVertex) -> Vec<FactorVertex> {
        let mut z = x.clone();
        z[j] = y.clone();
        z
    }

    fn validate(&self, x: &Vec<FactorVertex>) -> Result<(), ProductError> {
        if x.len() != self.factors.len() {
            return Err(ProductError::InitLength {
                expected: self.factors.len(),
                got: x.len(),
            });
        }
        for (i, v) in x.iter().enumerate() {
            if !self.factors[i].contains(v) {
                return Err(ProductError::InvalidInit {
                    factor: i,
                    vertex: v.clone(),
                });
            }
        }
        Ok(())
    }
}

/// The mashup `M_B` for a commutation graph `B` on the factor indices:
/// letters of factors adjacent in `B` commute.
///
/// Vertices are words in lexicographic normal form (among commuting
/// letters the smaller factor index comes first), reduced (two letters of
/// one factor are always separated by a letter that does not commute with
/// it), and satisfying the update condition of the free product. For an
/// edgeless `B` this is exactly the free product; for a complete `B` the
/// words are strictly increasing in factor index, giving the cartesian
/// product.
#[derive(Debug, Clone)]
pub struct GraphProduct {
    fs: FactorSystem,
    base: FiniteGraph,
}

impl GraphProduct {
    pub fn new(fs: FactorSystem, base: FiniteGraph) -> Result<Self, ProductError> {
        if base.order() != fs.n() {
            return Err(ProductError::BaseGraphSize {
                expected: fs.n(),
                got: base.order(),
            });
        }
        Ok(GraphProduct { fs, base })
    }

    pub fn system(&self) -> &FactorSystem {
        &self.fs
    }

    pub fn base_graph(&self) -> &FiniteGraph {
        &self.base
    }

    fn commute(&self, a: usize, b: usize) -> bool {
        self.base.has_edge(a, b)
    }

    /// Lexicographic normal form of the trace of `letters`.
    pub fn normalize(&self, mut letters: Vec<Letter>) -> Word {
        let mut out = Vec::with_capacity(letters.len());
        while !letters.is_empty() {
            let mut best: Option<usize> = None;
            for p in 0..letters.len() {
                let f = letters[p].factor;
                if letters[..p].iter().all(|l| self.commute(l.factor, f))
                    && best.is_none_or(|b| f < letters[b].factor)
                {
                    best = Some(p);
                }
            }
            out.push(letters.remove(best.expect("the first letter is always minimal")));
        }
        Word(out)
    }

    pub fn is_admissible(&self, w: &Word) -> Result<bool, ProductError> {
        let letters = w.letters();
        let mut u = self.fs.init().to_vec();
        for (k, l) in letters.iter().enumerate() {
            if l.factor >= self.fs.n() || !self.fs.factor(l.factor).contains(&l.vertex) {
                return Err(ProductError::InvalidLetter { position: k });
            }
            if u[l.factor] == l.vertex {
                return Ok(false);
            }
            u[l.factor] = l.vertex.clone();
            for prev in letters[..k].iter().rev() {
                if prev.factor == l.factor {
                    return Ok(false);
                }
                if !self.commute(prev.factor, l.factor) {
                    break;
                }
            }
        }
        Ok(self.normalize(letters.to_vec()) == *w)
    }

    fn check(&self, w: &Word) -> Result<(), ProductError> {
        if self.is_admissible(w)? {
            Ok(())
        } else {
            Err(ProductError::Inadmissible {
                word: self.fs.word_text(w),
                position: 0,
            })
        }
    }

    /// Position of the `j`-letter that can be moved to the end, if any.
    fn exposed(&self, w: &Word, j: usize) -> Option<usize> {
        for (k, l) in w.letters().iter().enumerate().rev() {
            if l.factor == j {
                return Some(k);
            }
            if !self.commute(l.factor, j) {
                return None;
            }
        }
        None
    }

    fn anchor(&self, w: &Word, j: usize) -> Word {
        match self.exposed(w, j) {
            Some(k) => {
                let mut letters = w.0.clone();
                letters.remove(k);
                self.normalize(letters)
            }
            None => w.clone(),
        }
    }

    pub fn ball(&self, radius: usize, cap: usize) -> Result<super::Ball<Word>, ProductError> {
        super::enumerate_ball(self, Word::empty(), radius, cap)
    }
}

impl LazyGraph for GraphProduct {
    type Vertex = Word;

    fn colours(&self) -> usize {
        self.fs.n()
    }

    fn lazy_neighbours(&self, w: &Word) -> Result<Vec<(Word, usize)>, ProductError> {
        let mut out = Vec::new();
        for j in 0..self.fs.n() {
            let anchor = self.anchor(w, j);
            let base = self.fs.coord_unchecked(&anchor, j);
            let here = self.fs.coord_unchecked(w, j);
            for y in self.fs.factor(j).neighbours(&here) {
                let next = if y == base {
                    anchor.clone()
                } else {
                    let mut letters = anchor.0.clone();
                    letters.push(Letter {
                        factor: j,
                        vertex: y,
                    });
                    self.normalize(letters)
                };
                out.push((next, j));
            }
        }
        Ok(out)
    }

    fn sheet_anchor(&self, w: &Word, colour: usize) -> Option<Word> {
        Some(self.anchor(w, colour))
    }
}

impl Mashup for GraphProduct {
    fn factor_list(&self) -> &[Factor] {
        self.fs.factors()
    }

    fn coordinate(&self, x: &Word, j: usize) -> FactorVertex {
        self.fs.coord_unchecked(x, j)
    }

    fn embed(&self, x: &Word, j: usize, y: &FactorVertex) -> Word {
        let anchor = self.anchor(x, j);
        if *y == self.fs.coord_unchecked(&anchor, j) {
            anchor
        } else {
            let mut letters = anchor.0;
            letters.push(Letter {
                factor: j,
                vertex: y.clone(),
            });
            self.normalize(letters)
        }
    }

    fn validate(&self, x: &Word) -> Result<(), ProductError> {
        self.check(x)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{labelled, w};
    use super::super::{enumerate_ball, DEFAULT_CAP};
    use super::*;
    use crate::graph::find_isomorphism;

    fn idx(v: &[usize]) -> Vec<FactorVertex> {
        v.iter().map(|&i| FactorVertex::Index(i)).collect()
    }

    #[test]
    fn psi_into_itself_is_identity() {
        let fs = labelled();
        for v in fs.ball(&Word::empty(), 3).unwrap().vertices {
            assert_eq!(quotient_map_psi(&fs, &fs, &Word::empty(), &v).unwrap(), v);
        }
    }

    #[test]
    fn psi_into_cartesian_product_is_u() {
        let fs = labelled();
        let cart = CartesianProduct::of(&fs);
        let x0 = fs.init().to_vec();
        assert_eq!(
            quotient_map_psi(&fs, &cart, &x0, &w(&fs, "a1 b2")).unwrap(),
            idx(&[1, 2])
        );
        for v in fs.ball(&Word::empty(), 4).unwrap().vertices {
            assert_eq!(
                quotient_map_psi(&fs, &cart, &x0, &v).unwrap(),
                fs.update_vector(&v).unwrap()
            );
        }
        assert!(matches!(
            quotient_map_psi(&fs, &cart, &idx(&[1, 0]), &Word::empty()),
            Err(ProductError::MismatchedInit { .. })
        ));
    }

    #[test]
    fn reanchor_examples() {
        let fs = labelled();
        let id = reanchor(&fs, &Word::empty()).unwrap();
        let a1 = w(&fs, "a1");
        assert_eq!(id.forward(&a1).unwrap(), a1);
        let at_b2 = reanchor(&fs, &w(&fs, "b2")).unwrap();
        assert_eq!(at_b2.forward(&a1).unwrap(), w(&fs, "b2 a1"));
        for v in at_b2.system.ball(&Word::empty(), 3).unwrap().vertices {
            let img = at_b2.forward(&v).unwrap();
            assert_eq!(at_b2.backward(&img).unwrap(), v);
            assert_eq!(
                fs.update_vector(&img).unwrap(),
                at_b2.system.update_vector(&v).unwrap()
            );
        }
    }

    #[test]
    fn cartesian_examples() {
        let t1 = Factor::finite(FiniteGraph::path(2));
        let sq = CartesianProduct::new(vec![t1.clone(), t1.clone()]);
        let b = sq.ball(&idx(&[0, 0]), 2, DEFAULT_CAP).unwrap();
        assert!(find_isomorphism(&b.to_graph(), &FiniteGraph::cycle(4), &[])
            .unwrap()
            .is_some());
        let single = CartesianProduct::new(vec![Factor::finite(FiniteGraph::cycle(5))]);
        let b = single.ball(&idx(&[0]), 2, DEFAULT_CAP).unwrap();
        assert_eq!(b.len(), 5);
        let fs = labelled();
        let b = CartesianProduct::of(&fs)
            .ball(fs.init(), 10, DEFAULT_CAP)
            .unwrap();
        assert_eq!((b.len(), b.edges.len()), (6, 7));
    }

    #[test]
    fn edgeless_base_gives_the_free_product() {
        let fs = labelled();
        let m = GraphProduct::new(fs.clone(), FiniteGraph::empty(2)).unwrap();
        assert_eq!(
            m.ball(3, DEFAULT_CAP).unwrap(),
            fs.ball(&Word::empty(), 3).unwrap()
        );
        let t1 = FiniteGraph::path(2);
        let line = FactorSystem::from_graphs(vec![t1.clone(), t1], &[0, 0]).unwrap();
        let m = GraphProduct::new(line, FiniteGraph::empty(2)).unwrap();
        let b = m.ball(3, DEFAULT_CAP).unwrap();
        assert!(
            find_isomorphism(&b.to_graph(), &FiniteGraph::path(7), &[(0, 3)])
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn complete_base_gives_the_cartesian_product() {
        let fs = labelled();
        let m = GraphProduct::new(fs.clone(), FiniteGraph::complete(2)).unwrap();
        let b = m.ball(6, DEFAULT_CAP).unwrap();
        let c = CartesianProduct::of(&fs)
            .ball(fs.init(), 6, DEFAULT_CAP)
            .unwrap();
        assert!(find_isomorphism(&b.to_graph(), &c.to_graph(), &[(0, 0)])
            .unwrap()
            .is_some());
        // The Γ₁-sheet at b₂ inserts a₁ before b₂.
        assert!(b.contains(&w(&fs, "a1 b2")));
        assert!(!b.contains(&w(&fs, "b2 a1")));
    }

    #[test]
    fn normal_form_needs_more_than_adjacent_swaps() {
        // 0-1 and 1-2 commute, 0 and 2 do not: 2·0·1 equals 1·2·0.
        let t1 = FiniteGraph::path(2);
        let fs = FactorSystem::from_graphs(vec![t1.clone(), t1.clone(), t1], &[0, 0, 0]).unwrap();
        let m = GraphProduct::new(fs, FiniteGraph::path(3)).unwrap();
        let word = Word::from_pairs(&[(2, 1), (0, 1), (1, 1)]);
        assert!(!m.is_admissible(&word).unwrap());
        assert_eq!(
            m.normalize(word.0.clone()),
            Word::from_pairs(&[(1, 1), (2, 1), (0, 1)])
        );
    }

    #[test]
    fn mashup_balls_satisfy_the_valency_formula() {
        let c4 = FiniteGraph::cycle(4);
        let t1 = FiniteGraph::path(2);
        let fs = FactorSystem::from_graphs(vec![c4, t1.clone(), t1], &[0, 0, 0]).unwrap();
        let m = GraphProduct::new(fs.clone(), FiniteGraph::new(3, &[(0, 1)]).unwrap()).unwrap();
        let b = enumerate_ball(&m, Word::empty(), 4, DEFAULT_CAP).unwrap();
        for i in (0..b.len()).filter(|&i| b.is_interior(i)) {
            let v = &b.vertices[i];
            assert!(m.is_admissible(v).unwrap());
            let expected: usize = (0..3)
                .map(|j| fs.factor(j).degree(&m.coordinate(v, j)))
                .sum();
            assert_eq!(b.adjacent(i).len(), expected);
        }
    }
}
