//! Evaluation, inversion and composition of automorphism specs.

use super::{index, inverse_perm, AutError, AutomorphismSpec, BetaRule};
use crate::product::{reanchor, transport, FactorSystem, FactorVertex, Letter, Word};

/// The image of an admissible word.
pub fn evaluate(fs: &FactorSystem, spec: &AutomorphismSpec, w: &Word) -> Result<Word, AutError> {
    fs.check_admissible(w)?;
    eval(fs, spec, w, false)
}

/// `a ∘ b`, flattening nested compositions.
pub fn compose(a: AutomorphismSpec, b: AutomorphismSpec) -> AutomorphismSpec {
    let mut parts = Vec::new();
    for s in [a, b] {
        match s {
            AutomorphismSpec::Compose { parts: inner } => parts.extend(inner),
            AutomorphismSpec::Identity => {}
            other => parts.push(other),
        }
    }
    match parts.len() {
        0 => AutomorphismSpec::Identity,
        1 => parts.pop().expect("one part"),
        _ => AutomorphismSpec::Compose { parts },
    }
}

/// A spec for the inverse, built from generator variants wherever possible.
pub fn invert(fs: &FactorSystem, spec: &AutomorphismSpec) -> Result<AutomorphismSpec, AutError> {
    use AutomorphismSpec::*;
    Ok(match spec {
        Identity => Identity,
        HatAlpha { factor, perm } => HatAlpha {
            factor: *factor,
            perm: inverse_perm(perm),
        },
        BetaFamily { rules } => {
            // β maps the subtree below p onto the subtree below β(p) and
            // preserves lengths, so rule priorities carry over.
            let mut inv = Vec::with_capacity(rules.len());
            for r in rules {
                inv.push(BetaRule {
                    prefix: eval(fs, spec, &r.prefix, false)?,
                    factor: r.factor,
                    perm: inverse_perm(&r.perm),
                    subtree: r.subtree,
                });
            }
            BetaFamily { rules: inv }
        }
        StabiliserWitness { base, factor, perm } => StabiliserWitness {
            base: base.clone(),
            factor: *factor,
            perm: inverse_perm(perm),
        },
        FactorSwapWitness { .. } | SheetSwap { .. } | CutSwap { .. } => spec.clone(),
        Reanchor { base } => Reanchor {
            base: transport(fs, base, fs, &Word::empty(), &Word::empty())?,
        },
        Conjugate { base, inner } => {
            let sys = fs.with_init(fs.update_vector(base)?)?;
            Conjugate {
                base: base.clone(),
                inner: Box::new(invert(&sys, inner)?),
            }
        }
        Table { pairs } => Table {
            pairs: pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        },
        Compose { parts } => {
            let mut inv = Vec::with_capacity(parts.len());
            for p in parts.iter().rev() {
                inv.push(invert(fs, p)?);
            }
            Compose { parts: inv }
        }
        Inverse { inner } => (**inner).clone(),
    })
}

/// The rule governing the next `factor`-letter after `prefix`.
pub(crate) fn beta_rule_at<'a>(
    rules: &'a [BetaRule],
    prefix: &Word,
    factor: usize,
) -> Option<&'a [usize]> {
    let mut best: Option<(usize, &BetaRule)> = None;
    for r in rules.iter().filter(|r| r.factor == factor) {
        let rank = if !r.subtree {
            if r.prefix != *prefix {
                continue;
            }
            usize::MAX
        } else {
            if !prefix.has_prefix(&r.prefix) {
                continue;
            }
            r.prefix.len()
        };
        if best.is_none_or(|(b, _)| rank > b) {
            best = Some((rank, r));
        }
    }
    best.map(|(_, r)| r.perm.as_slice())
}

fn apply(perm: Option<&[usize]>, v: &FactorVertex) -> FactorVertex {
    match perm {
        Some(p) => FactorVertex::Index(p[index(v)]),
        None => v.clone(),
    }
}

fn apply_inv(perm: Option<&[usize]>, v: &FactorVertex) -> FactorVertex {
    match perm {
        Some(p) => {
            let x = index(v);
            FactorVertex::Index(p.iter().position(|&y| y == x).expect("permutation"))
        }
        None => v.clone(),
    }
}

/// Evaluates a β-family given by `rule(source prefix, factor)`, checking
/// the side condition at each step.
fn eval_beta<'a>(
    fs: &FactorSystem,
    w: &Word,
    inverse: bool,
    rule: impl Fn(&Word, usize) -> Option<&'a [usize]>,
) -> Result<Word, AutError> {
    let mut src = Word::empty();
    let mut img = Word::empty();
    for l in w.letters() {
        let i = l.factor;
        let b = rule(&src, i);
        let side_src = fs.coord_unchecked(&src, i);
        let side_img = fs.coord_unchecked(&img, i);
        if apply(b, &side_src) != side_img {
            return Err(AutError::Compatibility {
                prefix: fs.word_text(&src),
                factor: i,
            });
        }
        let (s, t) = if inverse {
            (apply_inv(b, &l.vertex), l.vertex.clone())
        } else {
            (l.vertex.clone(), apply(b, &l.vertex))
        };
        src = src.pushed(Letter::new(i, s));
        img = img.pushed(Letter::new(i, t));
    }
    Ok(if inverse { src } else { img })
}

/// Exchanges letters of factors `i` and `j` through `iso`.
fn swap_letters(letters: &[Letter], i: usize, j: usize, iso: &[usize]) -> Vec<Letter> {
    letters
        .iter()
        .map(|l| {
            if l.factor == i {
                Letter::new(j, iso[index(&l.vertex)])
            } else if l.factor == j {
                let x = index(&l.vertex);
                Letter::new(i, iso.iter().position(|&y| y == x).expect("bijection"))
            } else {
                l.clone()
            }
        })
        .collect()
}

fn eval(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    w: &Word,
    inverse: bool,
) -> Result<Word, AutError> {
    use AutomorphismSpec::*;
    Ok(match spec {
        Identity => w.clone(),
        HatAlpha { factor, perm } => {
            let j = *factor;
            let p: Vec<usize> = if inverse {
                inverse_perm(perm)
            } else {
                perm.clone()
            };
            hat_alpha(fs, j, &p, w)
        }
        BetaFamily { rules } => eval_beta(fs, w, inverse, |p, i| beta_rule_at(rules, p, i))?,
        StabiliserWitness { base, factor, perm } => eval_beta(fs, w, inverse, |p, i| {
            (i == *factor && p.has_prefix(base)).then_some(perm.as_slice())
        })?,
        FactorSwapWitness {
            base,
            from,
            to,
            iso,
        } => {
            if !w.has_prefix(base) {
                return Ok(w.clone());
            }
            let mut letters = base.letters().to_vec();
            letters.extend(swap_letters(&w.letters()[base.len()..], *from, *to, iso));
            Word(letters)
        }
        SheetSwap {
            base,
            from,
            to,
            iso,
        } => {
            if base.is_empty() {
                match w.letters().first() {
                    Some(l) if l.factor == *from || l.factor == *to => {
                        Word(swap_letters(w.letters(), *from, *to, iso))
                    }
                    _ => w.clone(),
                }
            } else {
                let inner = SheetSwap {
                    base: Word::empty(),
                    from: *from,
                    to: *to,
                    iso: iso.clone(),
                };
                conjugate(fs, base, &inner, w, inverse)?
            }
        }
        CutSwap {
            from,
            to,
            iso,
            component,
        } => {
            let moved = match w.letters().first() {
                Some(l) if l.factor == *from => component.contains(&index(&l.vertex)),
                Some(l) if l.factor == *to => {
                    let x = index(&l.vertex);
                    component.iter().any(|&c| iso[c] == x)
                }
                _ => false,
            };
            if moved {
                Word(swap_letters(w.letters(), *from, *to, iso))
            } else {
                w.clone()
            }
        }
        Reanchor { base } => {
            if inverse {
                transport(fs, base, fs, &Word::empty(), w)?
            } else {
                transport(fs, &Word::empty(), fs, base, w)?
            }
        }
        Conjugate { base, inner } => conjugate(fs, base, inner, w, inverse)?,
        Table { pairs } => {
            let hit = if inverse {
                pairs.iter().find(|(_, b)| b == w).map(|(a, _)| a)
            } else {
                pairs.iter().find(|(a, _)| a == w).map(|(_, b)| b)
            };
            hit.cloned().unwrap_or_else(|| w.clone())
        }
        Compose { parts } => {
            let mut x = w.clone();
            if inverse {
                for p in parts {
                    x = eval(fs, p, &x, true)?;
                }
            } else {
                for p in parts.iter().rev() {
                    x = eval(fs, p, &x, false)?;
                }
            }
            x
        }
        Inverse { inner } => eval(fs, inner, w, !inverse)?,
    })
}

fn conjugate(
    fs: &FactorSystem,
    base: &Word,
    inner: &AutomorphismSpec,
    w: &Word,
    inverse: bool,
) -> Result<Word, AutError> {
    let r = reanchor(fs, base)?;
    let x = r.backward(w)?;
    let y = eval(&r.system, inner, &x, inverse)?;
    Ok(r.forward(&y)?)
}

/// The three-case extension of a factor automorphism `α` of factor `j`.
fn hat_alpha(fs: &FactorSystem, j: usize, alpha: &[usize], w: &Word) -> Word {
    let tilde = |l: &Letter| {
        if l.factor == j {
            Letter::new(j, alpha[index(&l.vertex)])
        } else {
            l.clone()
        }
    };
    let u = index(&fs.init()[j]);
    let mapped: Vec<Letter> = w.letters().iter().map(tilde).collect();
    if alpha[u] == u {
        return Word(mapped);
    }
    match w.letters().first() {
        Some(first) if first.factor == j => {
            if alpha[index(&first.vertex)] == u {
                Word(mapped[1..].to_vec())
            } else {
                Word(mapped)
            }
        }
        _ => {
            let mut letters = vec![Letter::new(j, alpha[u])];
            letters.extend(mapped);
            Word(letters)
        }
    }
}
