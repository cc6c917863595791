use super::*;
use crate::graph::FiniteGraph;
use crate::product::tests::{labelled, w};
use crate::product::Letter;

/// K_{1,2} ∗ C₃ initialised at a leaf of the star.
fn star_c3() -> FactorSystem {
    FactorSystem::from_graphs(vec![FiniteGraph::star(2), FiniteGraph::cycle(3)], &[1, 0]).unwrap()
}

fn t1s(n: usize) -> FactorSystem {
    FactorSystem::from_graphs(vec![FiniteGraph::path(2); n], &vec![0; n]).unwrap()
}

fn ball_words(fs: &FactorSystem, r: usize) -> Vec<Word> {
    fs.ball(&Word::empty(), r).unwrap().vertices
}

#[test]
fn hat_alpha_three_case_rule() {
    let fs = labelled();
    let a = make_hat_alpha(&fs, 0, vec![1, 0]).unwrap();
    assert_eq!(evaluate(&fs, &a, &Word::empty()).unwrap(), w(&fs, "a1"));
    assert_eq!(evaluate(&fs, &a, &w(&fs, "a1")).unwrap(), Word::empty());
    assert_eq!(evaluate(&fs, &a, &w(&fs, "b2")).unwrap(), w(&fs, "a1 b2"));
    let b = make_hat_alpha(&fs, 1, vec![1, 0, 2]).unwrap();
    assert_eq!(evaluate(&fs, &b, &Word::empty()).unwrap(), w(&fs, "b1"));
    for spec in [a, b] {
        let rep = verify_on_ball(&fs, &spec, 4).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.sheet_preserving && rep.colour_preserving);
    }
}

#[test]
fn hat_alpha_intertwines_update_vector() {
    let fs = labelled();
    let alpha = vec![1, 0, 2];
    let a = make_hat_alpha(&fs, 1, alpha.clone()).unwrap();
    for v in ball_words(&fs, 4) {
        let mut expect = fs.update_vector(&v).unwrap();
        expect[1] = FactorVertex::Index(alpha[index(&expect[1])]);
        let got = fs.update_vector(&evaluate(&fs, &a, &v).unwrap()).unwrap();
        assert_eq!(got, expect);
    }
}

#[test]
fn hat_alpha_is_a_homomorphism() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(4), FiniteGraph::path(2)], &[0, 0])
        .unwrap();
    let autos = automorphisms(fs.finite_factor(0).unwrap());
    for p in &autos {
        for q in &autos {
            let lhs = compose(
                make_hat_alpha(&fs, 0, p.clone()).unwrap(),
                make_hat_alpha(&fs, 0, q.clone()).unwrap(),
            );
            let rhs = make_hat_alpha(&fs, 0, compose_perm(p, q)).unwrap();
            for v in ball_words(&fs, 3) {
                assert_eq!(
                    evaluate(&fs, &lhs, &v).unwrap(),
                    evaluate(&fs, &rhs, &v).unwrap()
                );
            }
        }
    }
}

#[test]
fn hat_alpha_rejects_non_automorphisms() {
    let fs = labelled();
    assert_eq!(
        make_hat_alpha(&fs, 1, vec![2, 1, 0]),
        Err(AutError::NotAutomorphism(1))
    );
    assert!(make_hat_alpha(&fs, 1, vec![0, 0, 1]).is_err());
}

#[test]
fn identity_hat_alpha_is_identity() {
    let fs = labelled();
    let a = make_hat_alpha(&fs, 1, vec![0, 1, 2]).unwrap();
    for v in ball_words(&fs, 4) {
        assert_eq!(evaluate(&fs, &a, &v).unwrap(), v);
    }
}

#[test]
fn commutator_of_distinct_hats_preserves_u() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(3), FiniteGraph::cycle(4)], &[0, 0])
        .unwrap();
    let a = make_hat_alpha(&fs, 0, vec![1, 2, 0]).unwrap();
    let b = make_hat_alpha(&fs, 1, vec![1, 2, 3, 0]).unwrap();
    let ai = invert(&fs, &a).unwrap();
    let bi = invert(&fs, &b).unwrap();
    let comm = compose(compose(a, b), compose(ai, bi));
    let mut moved = false;
    for v in ball_words(&fs, 4) {
        let x = evaluate(&fs, &comm, &v).unwrap();
        assert_eq!(fs.update_vector(&x).unwrap(), fs.update_vector(&v).unwrap());
        moved |= x != v;
    }
    assert!(moved);
}

#[test]
fn beta_subtree_rule_matches_hat_alpha() {
    let fs = star_c3();
    let beta = make_beta(
        &fs,
        vec![BetaRule {
            prefix: Word::empty(),
            factor: 1,
            perm: vec![0, 2, 1],
            subtree: true,
        }],
    )
    .unwrap();
    let hat = make_hat_alpha(&fs, 1, vec![0, 2, 1]).unwrap();
    for v in ball_words(&fs, 4) {
        assert_eq!(
            evaluate(&fs, &beta, &v).unwrap(),
            evaluate(&fs, &hat, &v).unwrap()
        );
    }
}

#[test]
fn beta_identity_and_violations() {
    let fs = star_c3();
    let id = make_beta(&fs, vec![]).unwrap();
    for v in ball_words(&fs, 3) {
        assert_eq!(evaluate(&fs, &id, &v).unwrap(), v);
    }
    // A lone exact rule leaves later letters of the moved sheet untracked.
    let lone = make_beta(
        &fs,
        vec![BetaRule {
            prefix: Word::empty(),
            factor: 1,
            perm: vec![0, 2, 1],
            subtree: false,
        }],
    );
    assert!(matches!(
        lone,
        Err(AutError::Compatibility { factor: 1, .. })
    ));
    // Moving the coordinate at the prefix breaks the side condition there.
    let bad = make_beta(
        &fs,
        vec![BetaRule {
            prefix: Word::empty(),
            factor: 0,
            perm: vec![0, 2, 1],
            subtree: true,
        }],
    );
    assert!(matches!(
        bad,
        Err(AutError::Compatibility { factor: 0, .. })
    ));
}

#[test]
fn beta_inverse_is_a_beta_family() {
    let fs = star_c3();
    let spec = make_beta(
        &fs,
        vec![
            BetaRule {
                prefix: Word::empty(),
                factor: 1,
                perm: vec![0, 2, 1],
                subtree: true,
            },
            BetaRule {
                prefix: Word::from_pairs(&[(0, 0), (1, 1)]),
                factor: 1,
                perm: vec![1, 2, 0],
                subtree: true,
            },
        ],
    )
    .unwrap();
    let inv = invert(&fs, &spec).unwrap();
    assert!(matches!(inv, AutomorphismSpec::BetaFamily { .. }));
    validate(&fs, &inv).unwrap();
    for v in ball_words(&fs, 4) {
        let x = evaluate(&fs, &spec, &v).unwrap();
        assert_eq!(evaluate(&fs, &inv, &x).unwrap(), v);
    }
    assert!(verify_on_ball(&fs, &spec, 4).unwrap().passed);
}

#[test]
fn stabiliser_witness_fixes_balls() {
    // Depth 3 is not a witness depth here, so level k may use depth k + 1.
    let fs = star_c3();
    let ball = fs.ball(&Word::empty(), 5).unwrap();
    for k in 1..=3 {
        let found = (0..ball.len())
            .filter(|&i| ball.dist[i] == k || ball.dist[i] == k + 1)
            .find_map(|i| {
                let spec = make_stabiliser_witness(&fs, ball.vertices[i].clone(), 1, vec![0, 2, 1])
                    .ok()?;
                let rep = verify_on_ball(&fs, &spec, k + 2).unwrap();
                Some(rep)
            });
        let rep = found.unwrap_or_else(|| panic!("no witness for level {k}"));
        assert!(rep.passed, "{rep:?}");
        let fixed = rep.fixed_ball_radius.unwrap();
        assert!(fixed >= k && fixed < k + 2, "level {k}, fixed {fixed}");
    }
}

#[test]
fn stabiliser_witness_preconditions() {
    let fs = star_c3();
    let id = make_stabiliser_witness(&fs, Word::from_pairs(&[(0, 0)]), 1, vec![0, 1, 2]).unwrap();
    for v in ball_words(&fs, 3) {
        assert_eq!(evaluate(&fs, &id, &v).unwrap(), v);
    }
    let moved = Word::from_pairs(&[(1, 1), (0, 0)]);
    assert!(matches!(
        make_stabiliser_witness(&fs, moved, 1, vec![0, 2, 1]),
        Err(AutError::Precondition(_))
    ));
    assert!(make_stabiliser_witness(&fs, Word::from_pairs(&[(1, 1)]), 1, vec![0, 2, 1]).is_err());
    assert!(make_stabiliser_witness(&fs, Word::empty(), 1, vec![1, 2, 0]).is_err());
}

#[test]
fn factor_swap_witness_on_t3() {
    let fs = t1s(3);
    let base = Word::from_pairs(&[(2, 1)]);
    let spec = make_factor_swap_witness(&fs, base.clone(), 0, 1, vec![0, 1]).unwrap();
    let rep = verify_on_ball(&fs, &spec, 4).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert_eq!(rep.fixed_ball_radius, Some(1));
    let deep = Word::from_pairs(&[(2, 1), (0, 1), (2, 0)]);
    let rep = verify_on_ball(
        &fs,
        &make_factor_swap_witness(&fs, deep, 0, 1, vec![1, 0]).unwrap(),
        6,
    )
    .unwrap();
    assert!(rep.passed);
    assert_eq!(rep.fixed_ball_radius, Some(3));
}

#[test]
fn factor_swap_witness_preconditions() {
    let two = t1s(2);
    assert!(make_factor_swap_witness(&two, Word::from_pairs(&[(1, 1)]), 0, 1, vec![0, 1]).is_err());
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::path(2); 3], &[0, 1, 0]).unwrap();
    assert!(matches!(
        make_factor_swap_witness(&fs, Word::from_pairs(&[(2, 1)]), 0, 1, vec![0, 1]),
        Err(AutError::Precondition(_))
    ));
    assert!(make_factor_swap_witness(&fs, Word::from_pairs(&[(2, 1)]), 0, 1, vec![1, 0]).is_ok());
}

#[test]
fn sheet_swap_reflects_the_line() {
    let fs = t1s(2);
    let spec = make_sheet_swap(&fs, Word::empty(), 0, 1, vec![0, 1]).unwrap();
    assert_eq!(
        evaluate(&fs, &spec, &Word::from_pairs(&[(0, 1), (1, 1)])).unwrap(),
        Word::from_pairs(&[(1, 1), (0, 1)])
    );
    let rep = verify_on_ball(&fs, &spec, 4).unwrap();
    assert!(rep.passed && rep.fixes_root && rep.sheet_preserving && !rep.colour_preserving);
    let twice = compose(spec.clone(), spec);
    for v in ball_words(&fs, 4) {
        assert_eq!(evaluate(&fs, &twice, &v).unwrap(), v);
    }
}

#[test]
fn sheet_swap_away_from_root() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(3); 2], &[0, 0]).unwrap();
    let base = Word::from_pairs(&[(0, 1), (1, 2)]);
    let spec = make_sheet_swap(&fs, base.clone(), 0, 1, vec![0, 2, 1]).unwrap();
    assert_eq!(evaluate(&fs, &spec, &base).unwrap(), base);
    let rep = verify_on_ball(&fs, &spec, 4).unwrap();
    assert!(rep.passed && rep.sheet_preserving, "{rep:?}");
    let s_from = fs.sheet_of(&base, 0).unwrap();
    let s_to = fs.sheet_of(&base, 1).unwrap();
    let mut images: Vec<Word> = fs
        .sheet_vertices(&s_from, None)
        .unwrap()
        .iter()
        .map(|x| evaluate(&fs, &spec, x).unwrap())
        .collect();
    images.sort();
    let mut want = fs.sheet_vertices(&s_to, None).unwrap();
    want.sort();
    assert_eq!(images, want);
}

#[test]
fn sheet_swap_needs_isomorphic_factors() {
    let fs = labelled();
    assert!(matches!(
        make_sheet_swap(&fs, Word::empty(), 0, 1, vec![0, 1]),
        Err(AutError::NotIsomorphism { .. })
    ));
}

#[test]
fn cut_swap_is_not_sheet_preserving() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::path(3); 2], &[1, 1]).unwrap();
    let spec = make_cut_swap(&fs, 0, 1, vec![0, 1, 2], None).unwrap();
    let rep = verify_on_ball(&fs, &spec, 4).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(!rep.sheet_preserving);
    let twice = compose(spec.clone(), spec);
    for v in ball_words(&fs, 4) {
        assert_eq!(evaluate(&fs, &twice, &v).unwrap(), v);
    }
}

#[test]
fn cut_swap_needs_a_cut_vertex() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(4); 2], &[0, 0]).unwrap();
    assert!(matches!(
        make_cut_swap(&fs, 0, 1, vec![0, 1, 2, 3], Some(vec![1])),
        Err(AutError::Precondition(_))
    ));
    let p3 = FactorSystem::from_graphs(vec![FiniteGraph::path(3); 2], &[1, 1]).unwrap();
    assert!(make_cut_swap(&p3, 0, 1, vec![0, 1, 2], Some(vec![0, 2])).is_err());
}

#[test]
fn reanchor_round_trip() {
    let fs = labelled();
    let base = ball_words(&fs, 6)
        .into_iter()
        .find(|v| !v.is_empty() && fs.update_vector(v).unwrap() == fs.init())
        .unwrap();
    let spec = make_reanchor(&fs, base.clone()).unwrap();
    assert_eq!(evaluate(&fs, &spec, &Word::empty()).unwrap(), base);
    assert!(verify_on_ball(&fs, &spec, 4).unwrap().passed);
    let inv = invert(&fs, &spec).unwrap();
    assert!(matches!(inv, AutomorphismSpec::Reanchor { .. }));
    for v in ball_words(&fs, 4) {
        let x = evaluate(&fs, &spec, &v).unwrap();
        assert_eq!(fs.update_vector(&x).unwrap(), fs.update_vector(&v).unwrap());
        assert_eq!(evaluate(&fs, &inv, &x).unwrap(), v);
    }
    assert!(make_reanchor(&fs, w(&fs, "a1")).is_err());
}

#[test]
fn compose_with_inverse_is_identity() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(3), FiniteGraph::path(3)], &[0, 1])
        .unwrap();
    let b = Word::from_pairs(&[(0, 1)]);
    let specs = vec![
        make_hat_alpha(&fs, 0, vec![1, 2, 0]).unwrap(),
        make_hat_alpha(&fs, 1, vec![2, 1, 0]).unwrap(),
        AutomorphismSpec::Conjugate {
            base: b,
            inner: Box::new(make_hat_alpha(&fs, 1, vec![2, 1, 0]).unwrap()),
        },
        make_stabiliser_witness(&fs, Word::from_pairs(&[(0, 2)]), 1, vec![2, 1, 0]).unwrap(),
    ];
    let all = specs.iter().cloned().reduce(compose).unwrap();
    for spec in specs.into_iter().chain([all]) {
        validate(&fs, &spec).unwrap();
        let id = compose(spec.clone(), invert(&fs, &spec).unwrap());
        for v in ball_words(&fs, 5) {
            assert_eq!(evaluate(&fs, &id, &v).unwrap(), v);
        }
    }
}

#[test]
fn transitive_mover_hits_targets() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(3); 2], &[0, 0]).unwrap();
    let ball = fs.ball(&Word::empty(), 2).unwrap();
    for target in &ball.vertices {
        let spec = make_transitive_mover(&fs, &Word::empty(), target).unwrap();
        assert_eq!(evaluate(&fs, &spec, &Word::empty()).unwrap(), *target);
        assert!(verify_on_ball(&fs, &spec, 3).unwrap().passed);
    }
    let from = Word::from_pairs(&[(1, 2)]);
    let to = Word::from_pairs(&[(0, 1), (1, 1)]);
    let spec = make_transitive_mover(&fs, &from, &to).unwrap();
    assert_eq!(evaluate(&fs, &spec, &from).unwrap(), to);
}

#[test]
fn transitive_mover_translates_the_line() {
    let fs = t1s(2);
    let target = Word::from_pairs(&[(0, 1), (1, 1)]);
    let spec = make_transitive_mover(&fs, &Word::empty(), &target).unwrap();
    for v in ball_words(&fs, 4) {
        let x = evaluate(&fs, &spec, &v).unwrap();
        assert_eq!(fs.distance(&v, &x).unwrap(), 2);
    }
    assert_eq!(
        make_transitive_mover(&fs, &target, &target).unwrap(),
        AutomorphismSpec::Identity
    );
    assert!(matches!(
        make_transitive_mover(&labelled(), &Word::empty(), &Word::empty()),
        Err(AutError::NotVertexTransitive(_))
    ));
}

#[test]
fn corrupted_table_is_caught() {
    let fs = FactorSystem::from_graphs(vec![FiniteGraph::cycle(3); 2], &[0, 0]).unwrap();
    let a = Word::from_pairs(&[(0, 1)]);
    let b = Word::from_pairs(&[(0, 1), (1, 1)]);
    let spec = AutomorphismSpec::Table {
        pairs: vec![(a.clone(), b.clone()), (b, a)],
    };
    validate(&fs, &spec).unwrap();
    let rep = verify_on_ball(&fs, &spec, 3).unwrap();
    assert!(!rep.passed);
    assert!(rep.edge_failures > 0);
    assert!(rep.injective);
}

#[test]
fn spec_json_round_trip() {
    let spec = AutomorphismSpec::Compose {
        parts: vec![
            AutomorphismSpec::HatAlpha {
                factor: 1,
                perm: vec![1, 0, 2],
            },
            AutomorphismSpec::Conjugate {
                base: Word(vec![Letter::new(0, 1)]),
                inner: Box::new(AutomorphismSpec::Identity),
            },
        ],
    };
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"kind\":\"hat_alpha\""));
    let back: AutomorphismSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
}
