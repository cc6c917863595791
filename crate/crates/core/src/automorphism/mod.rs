//! Finitely described automorphisms of a free product.
//!
//! An [`AutomorphismSpec`] is a closed description that can be evaluated on
//! any admissible word. Constructors (`make_*`) check the side conditions
//! under which a description really is an automorphism; [`validate`] repeats
//! those checks for specs read from JSON.

mod eval;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{automorphisms, is_vertex_transitive, FiniteGraph};
use crate::product::{FactorSystem, FactorVertex, ProductError, Word};

pub use eval::{compose, evaluate, invert};
pub use verify::{is_sheet_preserving, verify_on_ball, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("permutation is not an automorphism of factor {0}")]
    NotAutomorphism(usize),
    #[error("map is not an isomorphism from factor {from} to factor {to}")]
    NotIsomorphism { from: usize, to: usize },
    #[error("factor {0} must be finite")]
    NeedsFiniteFactor(usize),
    #[error("side condition fails at prefix {prefix} for factor {factor}")]
    Compatibility { prefix: String, factor: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("factor {0} is not vertex-transitive")]
    NotVertexTransitive(usize),
}

fn pre(msg: impl Into<String>) -> AutError {
    AutError::Precondition(msg.into())
}

/// A rule of a β-family: at every prefix `ṽ` it covers, the next letter of
/// factor `factor` is mapped by `perm`.
///
/// An exact rule covers `ṽ = prefix` only; a subtree rule covers every word
/// having `prefix` as a prefix. Exact rules win over subtree rules, and a
/// longer subtree prefix wins over a shorter one. Uncovered positions use
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaRule {
    pub prefix: Word,
    pub factor: usize,
    pub perm: Vec<usize>,
    #[serde(default)]
    pub subtree: bool,
}

/// A finitely described automorphism. Factor automorphisms and factor
/// isomorphisms are permutation arrays: `perm[v]` is the image of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AutomorphismSpec {
    Identity,
    /// The extension `α̂` of an automorphism `α` of one factor.
    HatAlpha {
        factor: usize,
        perm: Vec<usize>,
    },
    /// `β(ṽ v) = β(ṽ) β_(ṽ,i)(v)` with `β_(ṽ,i)` given by rules.
    BetaFamily {
        rules: Vec<BetaRule>,
    },
    /// Applies `perm` to every later `factor`-letter of words extending `base`.
    StabiliserWitness {
        base: Word,
        factor: usize,
        perm: Vec<usize>,
    },
    /// Below `base`, exchanges letters of `from` and `to` through `iso`.
    FactorSwapWitness {
        base: Word,
        from: usize,
        to: usize,
        iso: Vec<usize>,
    },
    /// Fixes `base` and exchanges its `from`- and `to`-sheets.
    SheetSwap {
        base: Word,
        from: usize,
        to: usize,
        iso: Vec<usize>,
    },
    /// Exchanges the branches at `∅` whose first letter lies in `component`
    /// (a union of components of `Γ_from − u_from`) or in its image.
    CutSwap {
        from: usize,
        to: usize,
        iso: Vec<usize>,
        component: Vec<usize>,
    },
    /// The update-preserving automorphism sending `∅` to `base`.
    Reanchor {
        base: Word,
    },
    /// `ψ ∘ inner ∘ ψ⁻¹`, where `ψ` identifies the system initialised at
    /// `u(base)` with this one and sends `∅` to `base`.
    Conjugate {
        base: Word,
        inner: Box<AutomorphismSpec>,
    },
    /// A finite word table, identity elsewhere. Not checked to be an
    /// automorphism; `verify_on_ball` is the judge.
    Table {
        pairs: Vec<(Word, Word)>,
    },
    /// `parts[0] ∘ parts[1] ∘ …`: the last part is applied first.
    Compose {
        parts: Vec<AutomorphismSpec>,
    },
    Inverse {
        inner: Box<AutomorphismSpec>,
    },
}

/// Checks that `perm` is an adjacency-preserving bijection `a → b`.
fn is_isomorphism(a: &FiniteGraph, b: &FiniteGraph, perm: &[usize]) -> bool {
    if perm.len() != a.order() || a.order() != b.order() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut seen = vec![false; b.order()];
    for &p in perm {
        if p >= b.order() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    a.edges()
        .into_iter()
        .all(|(x, y)| b.has_edge(perm[x], perm[y]))
}

fn check_automorphism(fs: &FactorSystem, j: usize, perm: &[usize]) -> Result<(), AutError> {
    let g = finite(fs, j)?;
    if is_isomorphism(g, g, perm) {
        Ok(())
    } else {
        Err(AutError::NotAutomorphism(j))
    }
}

fn check_isomorphism(fs: &FactorSystem, i: usize, j: usize, iso: &[usize]) -> Result<(), AutError> {
    if i == j {
        return Err(pre("the two factors must differ"));
    }
    if is_isomorphism(finite(fs, i)?, finite(fs, j)?, iso) {
        Ok(())
    } else {
        Err(AutError::NotIsomorphism { from: i, to: j })
    }
}

fn finite(fs: &FactorSystem, j: usize) -> Result<&FiniteGraph, AutError> {
    match fs.finite_factor(j) {
        Ok(g) => Ok(g),
        Err(ProductError::NeedsFiniteFactor(j)) => Err(AutError::NeedsFiniteFactor(j)),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn index(v: &FactorVertex) -> usize {
    v.index().expect("finite factors use index vertices")
}

pub fn inverse_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// `a ∘ b` on permutation arrays.
pub fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Checks every side condition of `spec` against `fs`.
pub fn validate(fs: &FactorSystem, spec: &AutomorphismSpec) -> Result<(), AutError> {
    use AutomorphismSpec::*;
    match spec {
        Identity => Ok(()),
        HatAlpha { factor, perm } => check_automorphism(fs, *factor, perm),
        BetaFamily { rules } => validate_beta(fs, rules),
        StabiliserWitness { base, factor, perm } => {
            let j = *factor;
            check_automorphism(fs, j, perm)?;
            fs.check_admissible(base)?;
            if base.last_factor() == Some(j) {
                return Err(pre("the base word must not end in the witness factor"));
            }
            let u = index(&fs.init()[j]);
            if index(&fs.update_vector(base)?[j]) != u {
                return Err(pre(
                    "the base word must have the initial coordinate in the witness factor",
                ));
            }
            if perm[u] != u {
                return Err(pre(
                    "the factor automorphism must fix the initial coordinate",
                ));
            }
            Ok(())
        }
        FactorSwapWitness {
            base,
            from,
            to,
            iso,
        } => {
            if fs.n() < 3 {
                return Err(pre("factor-swap witnesses need at least three factors"));
            }
            check_isomorphism(fs, *from, *to, iso)?;
            fs.check_admissible(base)?;
            match base.last_factor() {
                Some(k) if k != *from && k != *to => {}
                _ => return Err(pre("the base word must end in a third factor")),
            }
            let u = fs.update_vector(base)?;
            if iso[index(&u[*from])] != index(&u[*to]) {
                return Err(pre(
                    "the isomorphism must match the coordinates of the base word",
                ));
            }
            Ok(())
        }
        SheetSwap {
            base,
            from,
            to,
            iso,
        } => {
            check_isomorphism(fs, *from, *to, iso)?;
            let u = fs.update_vector(base)?;
            if iso[index(&u[*from])] != index(&u[*to]) {
                return Err(pre(
                    "the isomorphism must match the coordinates of the base word",
                ));
            }
            Ok(())
        }
        CutSwap {
            from,
            to,
            iso,
            component,
        } => {
            check_isomorphism(fs, *from, *to, iso)?;
            let g = finite(fs, *from)?;
            let u = index(&fs.init()[*from]);
            if !g.cut_vertices().map_err(ProductError::from)?.contains(&u) {
                return Err(pre(format!(
                    "the initial coordinate of factor {from} is not a cut vertex"
                )));
            }
            if iso[u] != index(&fs.init()[*to]) {
                return Err(pre("the isomorphism must match the initial coordinates"));
            }
            check_cut_component(g, u, component)
        }
        Reanchor { base } => {
            if fs.update_vector(base)? != fs.init() {
                return Err(pre("the base word must have the initial update vector"));
            }
            Ok(())
        }
        Conjugate { base, inner } => {
            let sys = fs.with_init(fs.update_vector(base)?)?;
            validate(&sys, inner)
        }
        Table { pairs } => {
            let mut from: Vec<&Word> = Vec::new();
            let mut to: Vec<&Word> = Vec::new();
            for (a, b) in pairs {
                fs.check_admissible(a)?;
                fs.check_admissible(b)?;
                from.push(a);
                to.push(b);
            }
            from.sort();
            to.sort();
            let distinct = |v: &Vec<&Word>| v.windows(2).all(|p| p[0] != p[1]);
            if !distinct(&from) || !distinct(&to) {
                return Err(pre("table entries must be injective"));
            }
            Ok(())
        }
        Compose { parts } => parts.iter().try_for_each(|p| validate(fs, p)),
        Inverse { inner } => validate(fs, inner),
    }
}

/// `component` must be a non-empty proper union of components of `g − u`.
fn check_cut_component(g: &FiniteGraph, u: usize, component: &[usize]) -> Result<(), AutError> {
    let mut inside = vec![false; g.order()];
    for &v in component {
        if v >= g.order() || v == u {
            return Err(pre(
                "the component must consist of vertices other than the cut vertex",
            ));
        }
        inside[v] = true;
    }
    if component.is_empty() || inside.iter().filter(|&&b| b).count() + 1 == g.order() {
        return Err(pre(
            "the component must be a non-empty proper part of the factor",
        ));
    }
    for (x, y) in g.edges() {
        if x != u && y != u && inside[x] != inside[y] {
            return Err(pre(
                "the component must be a union of components of the factor minus the cut vertex",
            ));
        }
    }
    Ok(())
}

fn validate_beta(fs: &FactorSystem, rules: &[BetaRule]) -> Result<(), AutError> {
    for r in rules {
        check_automorphism(fs, r.factor, &r.perm)?;
        fs.check_admissible(&r.prefix)?;
        if !r.subtree && r.prefix.last_factor() == Some(r.factor) {
            return Err(pre(
                "an exact rule cannot act on the factor of the prefix's last letter",
            ));
        }
    }
    let spec = AutomorphismSpec::BetaFamily {
        rules: rules.to_vec(),
    };
    for r in rules {
        let image = evaluate(fs, &spec, &r.prefix)?;
        let u = index(&fs.update_vector(&r.prefix)?[r.factor]);
        if r.perm[u] != index(&fs.update_vector(&image)?[r.factor]) {
            return Err(AutError::Compatibility {
                prefix: fs.word_text(&r.prefix),
                factor: r.factor,
            });
        }
        // A letter moved by an exact rule must keep being tracked: the next
        // letter of the same factor is governed by some rule, or the
        // side condition fails there.
        if r.subtree || fs.n() < 2 {
            continue;
        }
        let other = (0..fs.n()).find(|&k| k != r.factor).expect("two factors");
        for v in 0..r.perm.len() {
            if v == u || r.perm[v] == v {
                continue;
            }
            let step = r.prefix.pushed(crate::product::Letter::new(r.factor, v));
            let other_u = index(&fs.update_vector(&step)?[other]);
            let y = (0..finite(fs, other)?.order())
                .find(|&y| y != other_u)
                .expect("factors have at least two vertices");
            let probe = step.pushed(crate::product::Letter::new(other, y));
            if eval::beta_rule_at(rules, &probe, r.factor).is_none() {
                return Err(AutError::Compatibility {
                    prefix: fs.word_text(&probe),
                    factor: r.factor,
                });
            }
        }
    }
    Ok(())
}

pub fn make_hat_alpha(
    fs: &FactorSystem,
    factor: usize,
    perm: Vec<usize>,
) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::HatAlpha { factor, perm };
    validate(fs, &spec)?;
    Ok(spec)
}

pub fn make_beta(fs: &FactorSystem, rules: Vec<BetaRule>) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::BetaFamily { rules };
    validate(fs, &spec)?;
    Ok(spec)
}

pub fn make_stabiliser_witness(
    fs: &FactorSystem,
    base: Word,
    factor: usize,
    perm: Vec<usize>,
) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::StabiliserWitness { base, factor, perm };
    validate(fs, &spec)?;
    Ok(spec)
}

pub fn make_factor_swap_witness(
    fs: &FactorSystem,
    base: Word,
    from: usize,
    to: usize,
    iso: Vec<usize>,
) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::FactorSwapWitness {
        base,
        from,
        to,
        iso,
    };
    validate(fs, &spec)?;
    Ok(spec)
}

pub fn make_sheet_swap(
    fs: &FactorSystem,
    base: Word,
    from: usize,
    to: usize,
    iso: Vec<usize>,
) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::SheetSwap {
        base,
        from,
        to,
        iso,
    };
    validate(fs, &spec)?;
    Ok(spec)
}

/// The cut-vertex swap. With `component = None`, the component of
/// `Γ_from − u_from` containing the least vertex is used.
pub fn make_cut_swap(
    fs: &FactorSystem,
    from: usize,
    to: usize,
    iso: Vec<usize>,
    component: Option<Vec<usize>>,
) -> Result<AutomorphismSpec, AutError> {
    let component = match component {
        Some(c) => c,
        None => {
            let g = finite(fs, from)?;
            let u = index(&fs.init()[from]);
            let keep: Vec<usize> = (0..g.order()).filter(|&v| v != u).collect();
            let rest = g.induced(&keep);
            let dist = rest.distances_from(0).map_err(ProductError::from)?;
            keep.iter()
                .zip(dist)
                .filter(|(_, d)| d.is_some())
                .map(|(&v, _)| v)
                .collect()
        }
    };
    let spec = AutomorphismSpec::CutSwap {
        from,
        to,
        iso,
        component,
    };
    validate(fs, &spec)?;
    Ok(spec)
}

pub fn make_reanchor(fs: &FactorSystem, base: Word) -> Result<AutomorphismSpec, AutError> {
    let spec = AutomorphismSpec::Reanchor { base };
    validate(fs, &spec)?;
    Ok(spec)
}

/// The lexicographically least automorphism of `g` sending `a` to `b`.
pub fn least_automorphism_mapping(g: &FiniteGraph, a: usize, b: usize) -> Option<Vec<usize>> {
    automorphisms(g).into_iter().find(|p| p[a] == b)
}

/// An automorphism sending `from` to `to`, built as a product of factor
/// automorphisms conjugated to the successive transition points.
pub fn make_transitive_mover(
    fs: &FactorSystem,
    from: &Word,
    to: &Word,
) -> Result<AutomorphismSpec, AutError> {
    for j in 0..fs.n() {
        if !is_vertex_transitive(finite(fs, j)?).map_err(ProductError::from)? {
            return Err(AutError::NotVertexTransitive(j));
        }
    }
    let mut parts = Vec::new();
    let mut here = from.clone();
    for step in fs.sheet_path(from, to)? {
        let c = step.colour;
        let a = index(&fs.update_vector(&here)?[c]);
        let b = index(&fs.update_vector(&step.to)?[c]);
        let perm = least_automorphism_mapping(finite(fs, c)?, a, b)
            .expect("vertex-transitive factors have a mapping automorphism");
        let hat = AutomorphismSpec::HatAlpha { factor: c, perm };
        parts.push(if here.is_empty() {
            hat
        } else {
            AutomorphismSpec::Conjugate {
                base: here.clone(),
                inner: Box::new(hat),
            }
        });
        here = step.to;
    }
    parts.reverse();
    Ok(match parts.len() {
        0 => AutomorphismSpec::Identity,
        1 => parts.pop().expect("one part"),
        _ => AutomorphismSpec::Compose { parts },
    })
}

#[cfg(test)]
mod tests;
