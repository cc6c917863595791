//! A fixed corpus of factor systems, seeded random automorphism specs, and
//! the checks run over them in batch.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automorphism::{
    compose, evaluate, make_cut_swap, make_factor_swap_witness, make_sheet_swap,
    make_stabiliser_witness, make_transitive_mover, validate, verify_on_ball, AutError,
    AutomorphismSpec, VerifyReport,
};
use crate::graph::{automorphisms, find_isomorphism, FiniteGraph};
use crate::product::{Factor, FactorSystem, FactorVertex, ProductError, Word};

/// A named system of the corpus.
#[derive(Debug, Clone)]
pub struct CorpusSystem {
    pub name: &'static str,
    pub system: FactorSystem,
}

/// The two-factor system with `Γ₁ = a₀ – a₁` and `Γ₂ = b₁ – b₂ – b₀`, at `(a₀, b₀)`.
pub fn labelled_system() -> FactorSystem {
    let g1 = FiniteGraph::path(2)
        .with_labels(vec!["a0".into(), "a1".into()])
        .expect("two labels");
    let g2 = FiniteGraph::new(3, &[(1, 2), (2, 0)])
        .expect("valid edges")
        .with_labels(vec!["b0".into(), "b1".into(), "b2".into()])
        .expect("three labels");
    FactorSystem::from_graphs(vec![g1, g2], &[0, 0]).expect("valid system")
}

/// Factors by short name: `T1` (an edge), `Pn`, `Cn`, `Kn`, `Sn` (star with
/// `n` leaves, centre 0), and `tree:d` for the infinite `d`-regular tree.
pub fn named_factor(name: &str) -> Option<Factor> {
    if let Some(d) = name.strip_prefix("tree:") {
        return d.parse::<u8>().ok().filter(|&d| d >= 1).map(|d| match d {
            1 => Factor::finite(FiniteGraph::path(2)),
            d => Factor::tree(d),
        });
    }
    if name == "T1" {
        return Some(Factor::finite(FiniteGraph::path(2)));
    }
    let (kind, n) = name.split_at(1);
    let n: usize = n.parse().ok()?;
    let g = match kind {
        "P" if n >= 2 => FiniteGraph::path(n),
        "C" if n >= 3 => FiniteGraph::cycle(n),
        "K" if n >= 2 => FiniteGraph::complete(n),
        "S" if n >= 1 => FiniteGraph::star(n),
        _ => return None,
    };
    Some(Factor::finite(g))
}

fn finite_system(names: &[&str], init: &[usize]) -> FactorSystem {
    let factors = names
        .iter()
        .map(|n| named_factor(n).expect("corpus names parse"))
        .collect();
    FactorSystem::new(
        factors,
        init.iter().map(|&v| FactorVertex::Index(v)).collect(),
    )
    .expect("corpus systems are valid")
}

/// Ten systems mixing transitive and non-transitive factors, two and three
/// factors, and one infinite tree factor.
pub fn corpus() -> Vec<CorpusSystem> {
    let tree_c4 = FactorSystem::new(
        vec![Factor::tree(3), named_factor("C4").expect("C4")],
        vec![FactorVertex::Path(vec![]), FactorVertex::Index(0)],
    )
    .expect("valid system");
    vec![
        CorpusSystem {
            name: "labelled",
            system: labelled_system(),
        },
        CorpusSystem {
            name: "C3*C3",
            system: finite_system(&["C3", "C3"], &[0, 0]),
        },
        CorpusSystem {
            name: "C3*C4",
            system: finite_system(&["C3", "C4"], &[0, 0]),
        },
        CorpusSystem {
            name: "K4*C3",
            system: finite_system(&["K4", "C3"], &[0, 0]),
        },
        CorpusSystem {
            name: "S2*C3",
            system: finite_system(&["S2", "C3"], &[1, 0]),
        },
        CorpusSystem {
            name: "T1*T1*T1",
            system: finite_system(&["T1", "T1", "T1"], &[0, 0, 0]),
        },
        CorpusSystem {
            name: "C3*C3*T1",
            system: finite_system(&["C3", "C3", "T1"], &[0, 0, 0]),
        },
        CorpusSystem {
            name: "P3*P3",
            system: finite_system(&["P3", "P3"], &[1, 1]),
        },
        CorpusSystem {
            name: "K4*C5",
            system: finite_system(&["K4", "C5"], &[0, 0]),
        },
        CorpusSystem {
            name: "tree:3*C4",
            system: tree_c4,
        },
    ]
}

/// Interior ball vertices whose degree differs from the sum of the factor
/// degrees at their coordinates.
pub fn valency_violations(fs: &FactorSystem, radius: usize) -> Result<usize, ProductError> {
    let ball = fs.ball(&Word::empty(), radius)?;
    let mut bad = 0;
    for i in (0..ball.len()).filter(|&i| ball.is_interior(i)) {
        let u = fs.update_vector(&ball.vertices[i])?;
        let want: usize = u
            .iter()
            .enumerate()
            .map(|(j, x)| fs.factor(j).degree(x))
            .sum();
        if ball.adjacent(i).len() != want {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Draws random specs for one system; every draw passes `validate`.
pub struct SpecSampler<'a> {
    fs: &'a FactorSystem,
    autos: Vec<Vec<Vec<usize>>>,
    words: Vec<Word>,
    rng: ChaCha8Rng,
}

impl<'a> SpecSampler<'a> {
    /// `reach` bounds the length of the base words used by local generators.
    pub fn new(fs: &'a FactorSystem, seed: u64, reach: usize) -> Result<Self, ProductError> {
        let autos = fs
            .factors()
            .iter()
            .map(|f| f.graph().map(automorphisms).unwrap_or_default())
            .collect();
        let words = fs.ball(&Word::empty(), reach)?.vertices;
        Ok(SpecSampler {
            fs,
            autos,
            words,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn finite_factors(&self) -> Vec<usize> {
        (0..self.fs.n())
            .filter(|&j| !self.autos[j].is_empty())
            .collect()
    }

    fn coord(&self, w: &Word, j: usize) -> Option<usize> {
        self.fs.update_vector(w).ok()?[j].index()
    }

    fn word(&mut self) -> Word {
        self.words
            .choose(&mut self.rng)
            .expect("the ball is non-empty")
            .clone()
    }

    fn graph(&self, j: usize) -> Option<&FiniteGraph> {
        self.fs.factor(j).graph()
    }

    /// One generator, or `None` when the drawn kind does not apply.
    fn try_generator(&mut self) -> Option<AutomorphismSpec> {
        let finite = self.finite_factors();
        let j = *finite.choose(&mut self.rng)?;
        let perm = self.autos[j].choose(&mut self.rng)?.clone();
        match self.rng.gen_range(0..7) {
            0 => Some(AutomorphismSpec::HatAlpha { factor: j, perm }),
            1 => {
                let base = self.word();
                Some(AutomorphismSpec::Conjugate {
                    base,
                    inner: Box::new(AutomorphismSpec::HatAlpha { factor: j, perm }),
                })
            }
            2 => {
                let base = self.word();
                let u = self.coord(&Word::empty(), j)?;
                let fixing: Vec<Vec<usize>> = self.autos[j]
                    .iter()
                    .filter(|p| p[u] == u)
                    .cloned()
                    .collect();
                let perm = fixing.choose(&mut self.rng)?.clone();
                make_stabiliser_witness(self.fs, base, j, perm).ok()
            }
            3 | 4 => {
                let k = *finite.choose(&mut self.rng)?;
                if k == j {
                    return None;
                }
                let base = self.word();
                let (a, b) = (self.coord(&base, j)?, self.coord(&base, k)?);
                let iso = find_isomorphism(self.graph(j)?, self.graph(k)?, &[(a, b)]).ok()??;
                if self.rng.gen_bool(0.5) {
                    make_sheet_swap(self.fs, base, j, k, iso).ok()
                } else {
                    make_factor_swap_witness(self.fs, base, j, k, iso).ok()
                }
            }
            5 => {
                let k = *finite.choose(&mut self.rng)?;
                if k == j {
                    return None;
                }
                let (a, b) = (
                    self.coord(&Word::empty(), j)?,
                    self.coord(&Word::empty(), k)?,
                );
                let iso = find_isomorphism(self.graph(j)?, self.graph(k)?, &[(a, b)]).ok()??;
                make_cut_swap(self.fs, j, k, iso, None).ok()
            }
            _ => {
                let to = self.word();
                make_transitive_mover(self.fs, &Word::empty(), &to).ok()
            }
        }
    }

    /// A composition of one to `max_parts` generators, each possibly inverted.
    pub fn sample(&mut self, max_parts: usize) -> AutomorphismSpec {
        let parts = self.rng.gen_range(1..=max_parts.max(1));
        let mut spec = AutomorphismSpec::Identity;
        for _ in 0..parts {
            let g = (0..32)
                .find_map(|_| self.try_generator())
                .unwrap_or(AutomorphismSpec::Identity);
            let g = if self.rng.gen_bool(0.25) {
                AutomorphismSpec::Inverse { inner: Box::new(g) }
            } else {
                g
            };
            spec = compose(spec, g);
        }
        debug_assert!(validate(self.fs, &spec).is_ok());
        spec
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AutoBatteryReport {
    pub system: String,
    pub specs: usize,
    pub radius: usize,
    /// Index of each failing spec with its serialised form.
    pub failures: Vec<(usize, String)>,
    pub homomorphism_violations: usize,
    pub intertwining_violations: usize,
}

impl AutoBatteryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.homomorphism_violations == 0
            && self.intertwining_violations == 0
    }
}

/// `count` random specs checked on `B(∅, radius)`, plus the extension
/// identities for every pair of factor automorphisms on the same ball.
pub fn auto_battery(
    name: &str,
    fs: &FactorSystem,
    count: usize,
    radius: usize,
    seed: u64,
) -> Result<AutoBatteryReport, AutError> {
    let mut sampler = SpecSampler::new(fs, seed, 2)?;
    let mut failures = Vec::new();
    for i in 0..count {
        let spec = sampler.sample(3);
        let rep = verify_on_ball(fs, &spec, radius)?;
        if !rep.passed {
            failures.push((i, serde_json::to_string(&spec).expect("specs serialise")));
        }
    }
    let (homomorphism_violations, intertwining_violations) = hat_identities(fs, radius.min(3))?;
    Ok(AutoBatteryReport {
        system: name.to_string(),
        specs: count,
        radius,
        failures,
        homomorphism_violations,
        intertwining_violations,
    })
}

/// Violations of `(αβ)^ = α̂β̂` and of `u(α̂ ṽ) = α̃(u(ṽ))` over a ball.
pub fn hat_identities(fs: &FactorSystem, radius: usize) -> Result<(usize, usize), AutError> {
    let ball = fs.ball(&Word::empty(), radius)?;
    let mut hom = 0;
    let mut inter = 0;
    for j in 0..fs.n() {
        let Some(g) = fs.factor(j).graph() else {
            continue;
        };
        let autos = automorphisms(g);
        let hat = |p: &[usize]| AutomorphismSpec::HatAlpha {
            factor: j,
            perm: p.to_vec(),
        };
        for a in &autos {
            for v in &ball.vertices {
                let img = evaluate(fs, &hat(a), v)?;
                let mut want = fs.update_vector(v)?;
                let x = want[j].index().expect("finite factor");
                want[j] = FactorVertex::Index(a[x]);
                if fs.update_vector(&img)? != want {
                    inter += 1;
                }
            }
            for b in &autos {
                let ab: Vec<usize> = (0..a.len()).map(|x| a[b[x]]).collect();
                for v in &ball.vertices {
                    let lhs = evaluate(fs, &hat(&ab), v)?;
                    let rhs = evaluate(fs, &hat(a), &evaluate(fs, &hat(b), v)?)?;
                    if lhs != rhs {
                        hom += 1;
                    }
                }
            }
        }
    }
    Ok((hom, inter))
}

/// A witness certifying level `k`: it fixes `B(∅, k)` pointwise and moves
/// some vertex within distance `k + 2`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelWitness {
    pub level: usize,
    pub spec: AutomorphismSpec,
    pub report: VerifyReport,
}

fn certifies(rep: &VerifyReport, k: usize) -> bool {
    rep.passed && rep.fixed_ball_radius.is_some_and(|f| f >= k && f < k + 2)
}

/// Stabiliser witnesses `β` for factor `j` and a factor automorphism fixing
/// the initial coordinate, based at words of length `k` or `k + 1`.
pub fn find_stabiliser_witness(
    fs: &FactorSystem,
    factor: usize,
    perm: &[usize],
    k: usize,
) -> Result<Option<LevelWitness>, AutError> {
    let ball = fs.ball(&Word::empty(), k + 1)?;
    for (i, base) in ball.vertices.iter().enumerate() {
        if ball.dist[i] < k {
            continue;
        }
        let Ok(spec) = make_stabiliser_witness(fs, base.clone(), factor, perm.to_vec()) else {
            continue;
        };
        let report = verify_on_ball(fs, &spec, k + 2)?;
        if certifies(&report, k) {
            return Ok(Some(LevelWitness {
                level: k,
                spec,
                report,
            }));
        }
    }
    Ok(None)
}

/// Factor-swap witnesses exchanging `from` and `to`, based at words of
/// length `k` or `k + 1` ending in a third factor.
pub fn find_factor_swap_witness(
    fs: &FactorSystem,
    from: usize,
    to: usize,
    k: usize,
) -> Result<Option<LevelWitness>, AutError> {
    let (Some(gf), Some(gt)) = (fs.factor(from).graph(), fs.factor(to).graph()) else {
        return Err(AutError::NeedsFiniteFactor(from));
    };
    let ball = fs.ball(&Word::empty(), k + 1)?;
    for (i, base) in ball.vertices.iter().enumerate() {
        if ball.dist[i] < k
            || matches!(base.last_factor(), Some(l) if l == from || l == to)
            || base.is_empty()
        {
            continue;
        }
        let u = fs.update_vector(base)?;
        let (a, b) = (
            u[from].index().expect("finite"),
            u[to].index().expect("finite"),
        );
        let Some(iso) = find_isomorphism(gf, gt, &[(a, b)]).map_err(ProductError::from)? else {
            continue;
        };
        let Ok(spec) = make_factor_swap_witness(fs, base.clone(), from, to, iso) else {
            continue;
        };
        let report = verify_on_ball(fs, &spec, k + 2)?;
        if certifies(&report, k) {
            return Ok(Some(LevelWitness {
                level: k,
                spec,
                report,
            }));
        }
    }
    Ok(None)
}
