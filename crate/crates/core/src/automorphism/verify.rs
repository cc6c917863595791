//! Checking specs against finite balls.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{evaluate, invert, AutError, AutomorphismSpec};
use crate::product::{FactorSystem, SheetId, Word};

/// Outcome of checking a spec on `B(∅, radius)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub radius: usize,
    pub vertices: usize,
    /// Words on which evaluation failed, with the error text.
    pub evaluation_errors: Vec<(String, String)>,
    pub injective: bool,
    /// Ball vertices whose image under the inverse spec is not themselves back.
    pub inverse_failures: usize,
    /// Ball edges whose images are not adjacent.
    pub edge_failures: usize,
    /// Interior vertices whose neighbourhood is not mapped onto the
    /// neighbourhood of the image.
    pub neighbourhood_failures: usize,
    pub fixes_root: bool,
    /// Largest `k ≤ radius` with `B(∅, k)` fixed pointwise.
    pub fixed_ball_radius: Option<usize>,
    pub sheet_preserving: bool,
    pub colour_preserving: bool,
    pub passed: bool,
}

pub fn verify_on_ball(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    radius: usize,
) -> Result<VerifyReport, AutError> {
    let ball = fs.ball(&Word::empty(), radius)?;
    let inverse = invert(fs, spec)?;
    let mut errors = Vec::new();
    let mut image: Vec<Option<Word>> = Vec::with_capacity(ball.len());
    let mut inverse_failures = 0;
    for v in &ball.vertices {
        match evaluate(fs, spec, v) {
            Ok(x) => {
                match evaluate(fs, &inverse, &x) {
                    Ok(back) if back == *v => {}
                    _ => inverse_failures += 1,
                }
                image.push(Some(x));
            }
            Err(e) => {
                errors.push((fs.word_text(v), e.to_string()));
                image.push(None);
            }
        }
    }
    let distinct: HashSet<&Word> = image.iter().flatten().collect();
    let injective = distinct.len() == image.iter().flatten().count();

    let mut nbr_cache: HashMap<Word, HashSet<Word>> = HashMap::new();
    let mut nbrs_of = |x: &Word| -> HashSet<Word> {
        nbr_cache
            .entry(x.clone())
            .or_insert_with(|| {
                fs.neighbours(x)
                    .map(|n| n.into_iter().map(|(y, _)| y).collect())
                    .unwrap_or_default()
            })
            .clone()
    };
    let mut edge_failures = 0;
    for e in &ball.edges {
        match (&image[e.a], &image[e.b]) {
            (Some(x), Some(y)) if nbrs_of(x).contains(y) => {}
            _ => edge_failures += 1,
        }
    }
    let mut neighbourhood_failures = 0;
    for i in 0..ball.len() {
        if !ball.is_interior(i) {
            continue;
        }
        let Some(x) = &image[i] else {
            neighbourhood_failures += 1;
            continue;
        };
        let mapped: Option<HashSet<Word>> = ball
            .adjacent(i)
            .iter()
            .map(|&(j, _)| image[j].clone())
            .collect();
        if mapped.as_ref() != Some(&nbrs_of(x)) {
            neighbourhood_failures += 1;
        }
    }

    let fixed = |i: usize| image[i].as_ref() == Some(&ball.vertices[i]);
    let fixes_root = fixed(0);
    let fixed_ball_radius = fixes_root.then(|| {
        (1..=radius)
            .take_while(|&k| (0..ball.len()).filter(|&i| ball.dist[i] == k).all(fixed))
            .last()
            .unwrap_or(0)
    });
    let (sheet_preserving, colour_preserving) = if errors.is_empty() {
        is_sheet_preserving(fs, spec, radius)?
    } else {
        (false, false)
    };
    let passed = errors.is_empty()
        && injective
        && inverse_failures == 0
        && edge_failures == 0
        && neighbourhood_failures == 0;
    Ok(VerifyReport {
        radius,
        vertices: ball.len(),
        evaluation_errors: errors,
        injective,
        inverse_failures,
        edge_failures,
        neighbourhood_failures,
        fixes_root,
        fixed_ball_radius,
        sheet_preserving,
        colour_preserving,
        passed,
    })
}

/// Whether every sheet lying inside `B(∅, radius − 1)` is mapped onto a
/// sheet, and whether additionally its colour is kept. Sheets of infinite
/// factors are judged on their members inside the window.
pub fn is_sheet_preserving(
    fs: &FactorSystem,
    spec: &AutomorphismSpec,
    radius: usize,
) -> Result<(bool, bool), AutError> {
    if radius == 0 {
        return Ok((true, true));
    }
    let ball = fs.ball(&Word::empty(), radius)?;
    let mut sheet_ok = true;
    let mut colour_ok = true;
    for s in &ball.sheets {
        let id = SheetId {
            anchor: s.anchor.clone(),
            colour: s.colour,
        };
        let members: Vec<Word> = match fs.factor(s.colour).order() {
            Some(_) => fs.sheet_vertices(&id, None)?,
            None => s
                .members
                .iter()
                .map(|&m| ball.vertices[m].clone())
                .collect(),
        };
        let inside = members
            .iter()
            .all(|m| ball.index_of(m).is_some_and(|i| ball.dist[i] < radius));
        if !inside || members.len() < 2 {
            continue;
        }
        let images: Vec<Word> = members
            .iter()
            .map(|m| evaluate(fs, spec, m))
            .collect::<Result<_, _>>()?;
        let target = (0..fs.n()).find(|&c| {
            let a = fs.sheet_of(&images[0], c).map(|t| t.anchor);
            images
                .iter()
                .all(|x| fs.sheet_of(x, c).map(|t| t.anchor).ok() == a.clone().ok())
                && fs.factor(c).order() == fs.factor(s.colour).order()
        });
        match target {
            None => {
                sheet_ok = false;
                colour_ok = false;
            }
            Some(c) => colour_ok &= c == s.colour,
        }
    }
    Ok((sheet_ok, colour_ok && sheet_ok))
}
