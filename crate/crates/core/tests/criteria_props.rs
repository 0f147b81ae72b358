mod common;

use common::{binary_tree, line, model_example, random_graph, unit_line};
use feller_core::criteria::{
    bounded_operator_check, compare_to_model, measure_divergence_check, sampled_base_points, twist_terms,
    twisted_feller_check, twisted_nonfeller_check, uniform_curvature_bound, Applies, CriteriaError, CriterionReport,
    CurvatureOrder, TwistFunction, TwistKind, Witness, DEFAULT_CUTOFF,
};
use feller_core::graph::{GraphBuilder, WeightedGraph};
use feller_core::model::{classify_feller, model_from_radial, ModelGraph, Tail, TailAnnotations};
use feller_core::{Conclusion, Grade, ScEvidence, ScSource};
use proptest::prelude::*;

fn sc() -> ScEvidence {
    ScEvidence::new(ScSource::Asserted, Grade::Certified, "fixture")
}

fn consistent(r: &CriterionReport) -> bool {
    r.conclusion == Conclusion::None || r.applies == Applies::Yes
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twisted_terms_reduce_to_the_corollaries(seed in any::<u64>(), lambda in -10.0f64..-0.1) {
        let g = random_graph(seed, 60);
        for (f, power) in [(TwistFunction::reciprocal(80), 1), (TwistFunction::shifted_reciprocal(80), 2)] {
            let kf = feller_core::graph::curvature_field(&g, 0).unwrap();
            for t in twist_terms(&g, 0, &f, lambda, DEFAULT_CUTOFF).unwrap() {
                let r = t.radius as f64;
                let lhs = kf.outer[t.vertex] - kf.inner[t.vertex] * (r + 1.0) / (r - 1.0);
                let rhs = lambda * (r + 1.0).powi(power);
                prop_assert!((t.divided_lhs - lhs).abs() <= 1e-12 * (kf.outer[t.vertex] + kf.inner[t.vertex] * (r + 1.0) / (r - 1.0)));
                prop_assert!(rel(t.divided_rhs, rhs) <= 1e-12);
                let inc = f.increment(t.radius).unwrap();
                prop_assert!((t.lhs - t.divided_lhs * inc).abs() <= 1e-12 * t.scale);
                prop_assert!(rel(t.rhs, t.divided_rhs * inc) <= 1e-12);
            }
        }
    }

    #[test]
    fn conclusions_only_when_applicable(seed in any::<u64>(), k in 0.0f64..20.0) {
        let g = random_graph(seed, 40);
        let base = sampled_base_points(&g, 0, 4).unwrap();
        let reports = [
            uniform_curvature_bound(&g, k, &base, false).unwrap(),
            uniform_curvature_bound(&g, k, &base, true).unwrap(),
            bounded_operator_check(&g, k),
            measure_divergence_check(&g, 0).unwrap(),
        ];
        for r in &reports {
            prop_assert!(consistent(r));
            prop_assert_eq!(r.grade.is_some(), r.conclusion != Conclusion::None);
        }
    }

    #[test]
    fn singleton_base_point_never_concludes(seed in any::<u64>(), x in 0usize..60) {
        let g = random_graph(seed, 60);
        prop_assume!(g.len() > 1);
        let x = x % g.len();
        let r = uniform_curvature_bound(&g, 1e9, &[x], true).unwrap();
        prop_assert_eq!(r.conclusion, Conclusion::None);
        let expected = format!("1 of {}", g.len());
        prop_assert!(r.scope_note.contains(&expected));
    }
}

#[test]
fn uniform_bound_examples() {
    let g = unit_line(40);
    let base = sampled_base_points(&g, 0, 20).unwrap();
    let r = uniform_curvature_bound(&g, 2.0, &base, false).unwrap();
    assert_eq!(
        (r.applies, r.conclusion, r.grade),
        (Applies::Yes, Conclusion::Feller, Some(Grade::TruncationScale))
    );
    let r = uniform_curvature_bound(&g, 0.0, &base, false).unwrap();
    assert_eq!(r.applies, Applies::No);

    let g = model_example(40);
    // Away from the base point κ₊ = κ₋ on the line, so only x = x₀ can fail.
    assert_eq!(
        uniform_curvature_bound(&g, 1e3, &[3], false).unwrap().applies,
        Applies::Yes
    );
    for n in [10usize, 20, 30] {
        let r = uniform_curvature_bound(&g, 1e3, &[n], false).unwrap();
        assert_eq!(r.applies, Applies::No);
        assert!(matches!(r.witness, Some(Witness::Vertex { vertex, .. }) if vertex == n));
        // At the base point itself κ₋ = 0 and κ₊ = 2(n+1)^3.
        let kf = feller_core::graph::curvature_field(&g, n).unwrap();
        assert!(rel(kf.outer[n] - kf.inner[n], 2.0 * ((n + 1) as f64).powi(3)) < 1e-12);
    }
}

#[test]
fn bounded_operator_examples() {
    assert_eq!(
        bounded_operator_check(&unit_line(30), 2.0).conclusion,
        Conclusion::Feller
    );
    let r = bounded_operator_check(&model_example(30), 1e4);
    assert_eq!(r.applies, Applies::No);
    match r.witness {
        Some(Witness::Vertex { lhs, .. }) => assert!(lhs > 1e4),
        other => panic!("unexpected witness {other:?}"),
    }
    let mut gb = GraphBuilder::new();
    gb.measure("c", 1.0);
    for i in 0..7 {
        let leaf = format!("l{i}");
        gb.measure(&leaf, 1.0).edge("c", &leaf, 1.0);
    }
    let star = gb.build().unwrap();
    assert_eq!(bounded_operator_check(&star, 7.0).applies, Applies::Yes);
    assert_eq!(bounded_operator_check(&star, 6.0).applies, Applies::No);
}

#[test]
fn measure_divergence_examples() {
    let r = measure_divergence_check(&unit_line(40), 0).unwrap();
    assert_eq!(r.conclusion, Conclusion::Feller);
    let two = line(40, |_| 1.0, |r| if r % 3 == 0 { 2.0 } else { 1.0 });
    assert_eq!(measure_divergence_check(&two, 0).unwrap().applies, Applies::Yes);
    let r = measure_divergence_check(&model_example(40), 0).unwrap();
    assert_eq!(r.applies, Applies::InconclusiveAtTruncation);
    match r.witness {
        Some(Witness::Ray { vertices, measures }) => {
            assert_eq!(vertices, (0..40).collect::<Vec<_>>());
            assert!(measures.windows(2).all(|w| w[1] < w[0]));
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn twisted_checks_on_the_model_example() {
    let g = model_example(64);
    let r = twisted_feller_check(&g, 0, &TwistFunction::reciprocal(66), -1.0, DEFAULT_CUTOFF).unwrap();
    assert_eq!(r.applies, Applies::No);
    match r.witness {
        Some(Witness::Vertex { radius, lhs, rhs, .. }) => {
            assert_eq!(radius, 3);
            assert!(lhs < rhs);
        }
        other => panic!("unexpected witness {other:?}"),
    }
    let f = TwistFunction::shifted_reciprocal(66);
    let r = twisted_nonfeller_check(&g, 0, &f, -1.0, DEFAULT_CUTOFF, Some(&sc())).unwrap();
    assert_eq!(r.conclusion, Conclusion::NotFeller);
    assert!(matches!(
        twisted_nonfeller_check(&g, 0, &f, -1.0, DEFAULT_CUTOFF, None),
        Err(CriteriaError::StochasticCompletenessNotEstablished)
    ));
    assert!(matches!(
        twisted_feller_check(&g, 0, &f, -1.0, DEFAULT_CUTOFF),
        Err(CriteriaError::TwistKindMismatch { .. })
    ));
    // Declared vanishing but flat on the range.
    let flat = TwistFunction::new(f.values.clone(), 1, TwistKind::Vanishing);
    assert!(matches!(
        twisted_feller_check(&g, 0, &flat, -1.0, DEFAULT_CUTOFF),
        Err(CriteriaError::WrongTwistKind { .. })
    ));
    let short = TwistFunction::reciprocal(10);
    assert!(matches!(
        twisted_feller_check(&g, 0, &short, -1.0, DEFAULT_CUTOFF),
        Err(CriteriaError::TwistTooShort { .. })
    ));
}

fn unit_line_model(len: usize) -> ModelGraph {
    let tails = TailAnnotations {
        inv_boundary: Some(Tail::power(0.0)),
        ball_measure_over_boundary: Some(Tail::power(-1.0)),
        sphere_measure: Some(Tail::power(0.0)),
        ..Default::default()
    };
    model_from_radial(vec![1.0; len], vec![1.0; len], tails).unwrap()
}

fn binary_tree_model(len: usize) -> ModelGraph {
    let tails = TailAnnotations {
        inv_boundary: Some(Tail::exp(std::f64::consts::LN_2)),
        ball_measure_over_boundary: Some(Tail::power(0.0)),
        sphere_measure: Some(Tail::exp(-std::f64::consts::LN_2)),
        ..Default::default()
    };
    model_from_radial(vec![2.0; len], (0..len).map(|r| 2f64.powi(r as i32)).collect(), tails).unwrap()
}

fn model_example_model(len: usize) -> ModelGraph {
    let tails = TailAnnotations {
        inv_boundary: Some(Tail::power(0.0)),
        tail_measure_over_boundary: Some(Tail::power(2.0)),
        ball_measure_over_boundary: Some(Tail::power(0.0)),
        sphere_measure: Some(Tail::power(3.0)),
    };
    let outer = (0..len).map(|r| ((r + 1) as f64).powi(3)).collect();
    let m = (0..len).map(|r| ((r + 1) as f64).powi(-3)).collect();
    model_from_radial(outer, m, tails).unwrap()
}

#[test]
fn comparison_is_reflexive() {
    let cases: [(WeightedGraph, ModelGraph); 3] = [
        (unit_line(40), unit_line_model(41)),
        (model_example(40), model_example_model(41)),
        (binary_tree(9), binary_tree_model(21)),
    ];
    for (g, mg) in cases {
        let class = classify_feller(&mg).unwrap();
        let (r, order) = compare_to_model(&g, 0, &mg, Some(&class), DEFAULT_CUTOFF).unwrap();
        assert_eq!(order, CurvatureOrder::Equal);
        assert_eq!(r.conclusion, class.outcome);
    }
    let mg = unit_line_model(41);
    assert!(matches!(
        compare_to_model(&unit_line(40), 0, &mg, None, 2),
        Err(CriteriaError::ModelNotClassified)
    ));
}

#[test]
fn doubled_line_is_incomparable() {
    let g = line(40, |_| 2.0, |_| 1.0);
    let mg = unit_line_model(41);
    let class = classify_feller(&mg).unwrap();
    let (r, order) = compare_to_model(&g, 0, &mg, Some(&class), DEFAULT_CUTOFF).unwrap();
    assert_eq!(order, CurvatureOrder::Incomparable);
    assert_eq!(r.conclusion, Conclusion::None);
}

/// Binary tree of the given depth with a third full binary subtree hanging
/// from the first vertex at depth `at`.
fn grafted_tree(depth: usize, at: usize) -> WeightedGraph {
    let g = binary_tree(depth);
    let mut gb = GraphBuilder::new();
    for x in 0..g.len() {
        gb.measure(g.name(x), 1.0);
        if g.is_frontier(x) {
            gb.frontier(g.name(x));
        }
    }
    for (u, v, b) in g.edges() {
        gb.edge(g.name(u), g.name(v), b);
    }
    let host = (1usize << at) - 1;
    let mut layer = vec![g.name(host).to_string()];
    let mut fresh = 0;
    for d in at..depth {
        let mut next = Vec::new();
        for p in &layer {
            let kids = if d == at { 1 } else { 2 };
            for _ in 0..kids {
                let name = format!("g{fresh}");
                fresh += 1;
                gb.measure(&name, 1.0).edge(p, &name, 1.0);
                if d + 1 == depth {
                    gb.frontier(&name);
                }
                next.push(name);
            }
        }
        layer = next;
    }
    gb.build().unwrap()
}

#[test]
fn grafted_tree_is_stronger_than_the_binary_model() {
    let mg = binary_tree_model(21);
    let class = classify_feller(&mg).unwrap();
    let (r, order) = compare_to_model(&grafted_tree(9, 3), 0, &mg, Some(&class), DEFAULT_CUTOFF).unwrap();
    assert_eq!(order, CurvatureOrder::Stronger);
    assert_eq!(r.conclusion, Conclusion::Feller);
    // A graft inside the ignored ball changes nothing.
    let (_, order) = compare_to_model(&grafted_tree(9, 2), 0, &mg, Some(&class), DEFAULT_CUTOFF).unwrap();
    assert_eq!(order, CurvatureOrder::Equal);
    let (_, order) = compare_to_model(&grafted_tree(9, 2), 0, &mg, Some(&class), 1).unwrap();
    assert_eq!(order, CurvatureOrder::Stronger);
}
