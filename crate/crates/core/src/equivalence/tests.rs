use super::*;

fn rooted(graphs: Vec<FiniteGraph>, roots: Vec<usize>) -> RootedFactors {
    RootedFactors::new(graphs, roots).unwrap()
}

fn words_ball(rf: &RootedFactors, r: usize) -> Ball<usize> {
    definition_ball(Definition::Words, rf, r, PortPolicy::Sorted)
        .unwrap()
        .ball
}

#[test]
fn mswz_of_two_edges_is_a_line() {
    let sys = MswzSystem::new(
        FiniteGraph::path(2),
        FiniteGraph::path(2),
        PortPolicy::Sorted,
    )
    .unwrap();
    for r in 0..6 {
        let ball = sys.ball(r).unwrap();
        assert_eq!(ball.len(), 2 * r + 1);
        assert!((0..ball.len()).all(|i| ball.adjacent(i).len() <= 2));
    }
}

#[test]
fn mswz_neighbours_are_symmetric() {
    for policy in [PortPolicy::Sorted, PortPolicy::Reverse] {
        let sys = MswzSystem::new(FiniteGraph::cycle(4), FiniteGraph::complete(3), policy).unwrap();
        let ball = sys.ball(3).unwrap();
        for v in &ball.vertices {
            for (w, c) in sys.lazy_neighbours(v).unwrap() {
                let back = sys.lazy_neighbours(&w).unwrap();
                assert!(back.contains(&(v.clone(), c)), "{v:?} -> {w:?}");
            }
        }
    }
}

#[test]
fn mswz_rejects_non_transitive_factor() {
    let err = MswzSystem::new(
        FiniteGraph::cycle(3),
        FiniteGraph::path(3),
        PortPolicy::Sorted,
    )
    .unwrap_err();
    assert_eq!(err, EquivError::NotVertexTransitive(1));
}

#[test]
fn mswz_matches_words_for_both_policies() {
    let rf = rooted(
        vec![FiniteGraph::cycle(3), FiniteGraph::cycle(4)],
        vec![0, 0],
    );
    let words = words_ball(&rf, 3);
    for policy in [PortPolicy::Sorted, PortPolicy::Reverse] {
        let b = definition_ball(Definition::Mswz, &rf, 3, policy)
            .unwrap()
            .ball;
        assert!(
            rooted_ball_isomorphic(&words, &b).unwrap().is_some(),
            "{policy:?}"
        );
    }
}

#[test]
fn pt_and_quenell_agree_at_non_transitive_roots() {
    let rf = rooted(vec![FiniteGraph::star(2), FiniteGraph::path(4)], vec![1, 1]);
    let pt = definition_ball(Definition::PisanskiTucker, &rf, 3, PortPolicy::Sorted)
        .unwrap()
        .ball;
    let q = definition_ball(Definition::Quenell, &rf, 3, PortPolicy::Sorted)
        .unwrap()
        .ball;
    assert_eq!(pt.len(), q.len());
    assert!(rooted_ball_isomorphic(&pt, &q).unwrap().is_some());
}

#[test]
fn frozen_roots_differ_from_words_on_a_non_transitive_factor() {
    // Deeper sheets of the word construction attach at the current
    // coordinate, not at the root, so leaves of the star reappear as roots.
    let rf = rooted(
        vec![FiniteGraph::star(2), FiniteGraph::cycle(3)],
        vec![1, 0],
    );
    let words = words_ball(&rf, 3);
    let pt = definition_ball(Definition::PisanskiTucker, &rf, 3, PortPolicy::Sorted)
        .unwrap()
        .ball;
    assert_eq!(rooted_ball_isomorphic(&words, &pt).unwrap(), None);
}

#[test]
fn three_transitive_factors_agree_across_word_definitions() {
    let rf = rooted(
        vec![
            FiniteGraph::path(2),
            FiniteGraph::cycle(3),
            FiniteGraph::complete(4),
        ],
        vec![0, 0, 0],
    );
    let reports = compare_definitions(
        &rf,
        &[
            Definition::Words,
            Definition::PisanskiTucker,
            Definition::Quenell,
        ],
        3,
    )
    .unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.isomorphic));
}

#[test]
fn three_factor_frozen_root_constructions_agree() {
    let rf = rooted(
        vec![
            FiniteGraph::path(2),
            FiniteGraph::path(3),
            FiniteGraph::star(2),
        ],
        vec![0, 1, 0],
    );
    let reports =
        compare_definitions(&rf, &[Definition::PisanskiTucker, Definition::Quenell], 3).unwrap();
    assert!(reports[0].isomorphic);
}

#[test]
fn quenell_truncation_is_exact_on_the_ball() {
    let rf = rooted(
        vec![FiniteGraph::cycle(3), FiniteGraph::path(3)],
        vec![0, 1],
    );
    let q = QuenellSystem(rf.clone());
    let shallow = q.ball(2).unwrap();
    let (deep, root) = q.truncated(4);
    let deep_ball = enumerate_ball(&deep, root, 2, DEFAULT_CAP).unwrap();
    assert!(rooted_ball_isomorphic(&shallow, &deep_ball)
        .unwrap()
        .is_some());
}

#[test]
fn different_products_are_told_apart() {
    let a = words_ball(
        &rooted(
            vec![FiniteGraph::cycle(3), FiniteGraph::cycle(3)],
            vec![0, 0],
        ),
        2,
    );
    let b = words_ball(
        &rooted(
            vec![FiniteGraph::cycle(4), FiniteGraph::path(2)],
            vec![0, 0],
        ),
        2,
    );
    assert_eq!(rooted_ball_isomorphic(&a, &b).unwrap(), None);
}

#[test]
fn different_roots_can_give_different_balls() {
    let leaf = words_ball(
        &rooted(vec![FiniteGraph::star(2), FiniteGraph::path(2)], vec![1, 0]),
        3,
    );
    let centre = words_ball(
        &rooted(vec![FiniteGraph::star(2), FiniteGraph::path(2)], vec![0, 0]),
        3,
    );
    assert_eq!(rooted_ball_isomorphic(&leaf, &centre).unwrap(), None);
}

#[test]
fn radius_mismatch_is_an_error() {
    let rf = rooted(
        vec![FiniteGraph::cycle(3), FiniteGraph::cycle(3)],
        vec![0, 0],
    );
    let err = rooted_ball_isomorphic(&words_ball(&rf, 1), &words_ball(&rf, 2)).unwrap_err();
    assert_eq!(err, EquivError::RadiusMismatch { a: 1, b: 2 });
}

#[test]
fn mapping_is_an_isomorphism_fixing_the_centre() {
    let rf = rooted(
        vec![FiniteGraph::complete(4), FiniteGraph::cycle(4)],
        vec![0, 0],
    );
    let a = words_ball(&rf, 2);
    let b = definition_ball(Definition::PisanskiTucker, &rf, 2, PortPolicy::Sorted)
        .unwrap()
        .ball;
    let m = rooted_ball_isomorphic(&a, &b).unwrap().unwrap();
    assert_eq!(m[0], 0);
    let (ga, gb) = (a.to_graph(), b.to_graph());
    for (x, y) in ga.edges() {
        assert!(gb.has_edge(m[x], m[y]));
    }
    assert_eq!(ga.edge_count(), gb.edge_count());
}

#[test]
fn report_json_uses_camel_case_and_omits_missing_mapping() {
    let r = ComparisonReport {
        definition_a: Definition::Words,
        definition_b: Definition::Quenell,
        radius: 2,
        isomorphic: false,
        mapping: None,
    };
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["definitionA"], "words");
    assert_eq!(v["definitionB"], "quenell");
    assert!(v.get("mapping").is_none());
}

#[test]
fn mswz_needs_two_factors() {
    let rf = rooted(vec![FiniteGraph::cycle(3); 3], vec![0; 3]);
    let err = definition_ball(Definition::Mswz, &rf, 1, PortPolicy::Sorted).unwrap_err();
    assert_eq!(
        err,
        EquivError::FactorCount {
            expected: 2,
            got: 3
        }
    );
}
