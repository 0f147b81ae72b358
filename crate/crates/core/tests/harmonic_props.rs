mod common;

use common::{binary_tree, line, model_example, random_graph, unit_line};
use feller_core::graph::{ball_exhaustion, metric_view, region, WeightedGraph};
use feller_core::harmonic::{
    feller_verdict_from_h, lambda_harmonic_residual, minimal_h, solve_hn, verify_subsolution, verify_supersolution,
    Condition, ExteriorProblem, HEvidence, HarmonicError,
};
use feller_core::model::{increasing_solution, model_from_radial, radial_h, Tail, TailAnnotations};
use feller_core::{Conclusion, Grade, ScEvidence, ScSource};
use proptest::prelude::*;

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - √5) / 2

fn point(g: &WeightedGraph, x: usize, lambda: f64) -> ExteriorProblem {
    ExteriorProblem::new(region(g, [x]).unwrap(), lambda).unwrap()
}

fn ball_problem(g: &WeightedGraph, k: usize, lambda: f64) -> ExteriorProblem {
    let mv = metric_view(g, 0).unwrap();
    ExteriorProblem::new(region(g, mv.ball(k)).unwrap(), lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hn_between_zero_and_one_and_increasing(seed in any::<u64>(), li in 0usize..3) {
        let lambda = [-0.1, -1.0, -10.0][li];
        let g = random_graph(seed, 60);
        let mv = metric_view(&g, 0).unwrap();
        if mv.radius() < 3 {
            return Ok(());
        }
        let radii: Vec<usize> = (1..mv.radius()).collect();
        let exh = ball_exhaustion(&g, 0, &radii, false).unwrap();
        let p = point(&g, 0, lambda);
        let mut previous: Option<Vec<f64>> = None;
        for reg in &exh.regions {
            let h = solve_hn(&g, &p, reg).unwrap();
            for &x in reg.interior.iter().filter(|&&x| x != 0) {
                prop_assert!(h[x] > 0.0 && h[x] < 1.0, "h = {} at {}", h[x], x);
            }
            prop_assert_eq!(h[0], 1.0);
            let test: Vec<usize> = reg.interior.iter().copied().filter(|&x| x != 0).collect();
            prop_assert!(lambda_harmonic_residual(&g, &h, lambda, &test).unwrap() < 1e-10 * (1.0 + lambda.abs()) * 100.0);
            if let Some(prev) = &previous {
                for x in 0..g.len() {
                    prop_assert!(h[x] >= prev[x] - 1e-12);
                }
            }
            previous = Some(h);
        }
    }
}

#[test]
fn hand_solves_on_the_unit_line() {
    let g = unit_line(10);
    let p = point(&g, 0, -1.0);
    let mv = metric_view(&g, 0).unwrap();
    let h2 = solve_hn(&g, &p, &region(&g, mv.ball(2)).unwrap()).unwrap();
    let h3 = solve_hn(&g, &p, &region(&g, mv.ball(3)).unwrap()).unwrap();
    assert!((h2[1] - 1.0 / 3.0).abs() < 1e-12);
    assert!((h3[1] - 3.0 / 8.0).abs() < 1e-12);
    assert!((h3[2] - 1.0 / 8.0).abs() < 1e-12);
    assert_eq!(h2[2], 0.0);
}

#[test]
fn unit_line_decays_geometrically() {
    let g = unit_line(66);
    let exh = ball_exhaustion(&g, 0, &[32, 64], false).unwrap();
    let sol = minimal_h(&g, &point(&g, 0, -1.0), &exh, 1e-8, 3).unwrap();
    assert!(sol.converged);
    assert!((sol.limit[1] - GOLDEN).abs() < 1e-6);
    for r in 5..=32 {
        assert!((sol.limit[r] / sol.limit[r - 1] - GOLDEN).abs() < 1e-4, "r = {r}");
    }
    let exact: Vec<f64> = (0..=66).map(|r| GOLDEN.powi(r)).collect();
    let interior: Vec<usize> = (1..60).collect();
    assert!(lambda_harmonic_residual(&g, &exact, -1.0, &interior).unwrap() < 1e-10);
    assert_eq!(
        feller_verdict_from_h(&sol, 1e-3).unwrap().evidence,
        HEvidence::FellerEvidence
    );
}

#[test]
fn ball_omega_keeps_its_boundary_at_one() {
    let g = binary_tree(7);
    let exh = ball_exhaustion(&g, 0, &[3, 5], false).unwrap();
    let p = ball_problem(&g, 1, -1.0);
    let sol = minimal_h(&g, &p, &exh, 1e-8, 1).unwrap();
    for &x in &p.omega.boundary {
        assert_eq!(sol.limit[x], 1.0);
    }
}

#[test]
fn omega_outside_the_first_region_is_rejected() {
    let g = unit_line(20);
    let exh = ball_exhaustion(&g, 0, &[2, 10], false).unwrap();
    let err = minimal_h(&g, &ball_problem(&g, 2, -1.0), &exh, 1e-8, 3).unwrap_err();
    assert_eq!(err, HarmonicError::OmegaNotInsideRegion);
}

#[test]
fn two_annuli_are_not_enough() {
    let g = unit_line(12);
    let exh = ball_exhaustion(&g, 0, &[6], false).unwrap();
    let sol = minimal_h(&g, &point(&g, 0, -1.0), &exh, 1e-8, 3).unwrap();
    assert!(matches!(
        feller_verdict_from_h(&sol, 1e-3),
        Err(HarmonicError::InsufficientAnnuli { .. })
    ));
}

#[test]
fn model_example_levels_off() {
    let g = model_example(513);
    let exh = ball_exhaustion(&g, 0, &[255, 510], false).unwrap();
    let sol = minimal_h(&g, &point(&g, 0, -1.0), &exh, 1e-8, 3).unwrap();
    let v = feller_verdict_from_h(&sol, 1e-3).unwrap();
    assert_eq!(v.evidence, HEvidence::NonFellerEvidence);
    assert!(v.values.iter().all(|&x| x > 0.6 && x < 0.7));
}

#[test]
fn tree_subsolution_from_the_green_function() {
    let g = binary_tree(10);
    let mv = metric_view(&g, 0).unwrap();
    let v: Vec<f64> = (0..g.len()).map(|x| 0.5f64.powi(mv.distance[x] as i32)).collect();
    let exh = ball_exhaustion(&g, 0, &[4, 8], false).unwrap();
    for lambda in [-0.1, -1.0, -10.0] {
        let p = point(&g, 0, lambda);
        let sol = minimal_h(&g, &p, &exh, 1e-8, 1).unwrap();
        let rep = verify_subsolution(&g, &v, &p, 0, Some(&sol), 1e-2).unwrap();
        assert_eq!(rep.confirmed, Some(true));
        assert!(rep.confirmed_vertices > 0);
        assert!(rep.decays);
        assert_eq!(rep.conclusion, Conclusion::Feller);
    }
}

#[test]
fn constant_subsolution_gives_no_conclusion() {
    let g = unit_line(20);
    let v = vec![1.0; g.len()];
    let rep = verify_subsolution(&g, &v, &point(&g, 0, -1.0), 0, None, 1e-3).unwrap();
    assert_eq!(rep.conclusion, Conclusion::None);
    assert!(!rep.decays);
}

#[test]
fn subsolution_below_one_on_the_boundary_is_rejected() {
    let g = unit_line(20);
    let mut v: Vec<f64> = (0..g.len()).map(|r| GOLDEN.powi(r as i32)).collect();
    v[0] = 0.5;
    let err = verify_subsolution(&g, &v, &point(&g, 0, -1.0), 0, None, 1e-3).unwrap_err();
    assert!(matches!(
        err,
        HarmonicError::ConditionViolated {
            condition: Condition::BoundaryLower,
            ..
        }
    ));
}

#[test]
fn model_example_supersolution() {
    let g = model_example(200);
    let p = ball_problem(&g, 1, -1.0);
    let v: Vec<f64> = (0..g.len())
        .map(|r| if r == 0 { 1.0 } else { (1.0 / r as f64 + 1.0) / 2.0 })
        .collect();
    let sc = ScEvidence::new(ScSource::ModelSeries, Grade::Certified, "divergent ball series");
    let exh = ball_exhaustion(&g, 0, &[98, 196], false).unwrap();
    let sol = minimal_h(&g, &p, &exh, 1e-8, 3).unwrap();
    let rep = verify_supersolution(&g, &v, &p, 0, Some(&sc), Some(&sol), 1e-3).unwrap();
    assert_eq!(rep.conclusion, Conclusion::NotFeller);
    assert!(!rep.decays);
    assert_eq!(rep.confirmed, Some(true));
    assert!(matches!(
        verify_supersolution(&g, &v, &p, 0, None, None, 1e-3),
        Err(HarmonicError::StochasticCompletenessNotEstablished)
    ));
    let ones = vec![1.0; g.len()];
    assert!(matches!(
        verify_supersolution(&g, &ones, &point(&g, 0, -1.0), 0, Some(&sc), None, 1e-3),
        Err(HarmonicError::ConditionViolated {
            condition: Condition::SuperInequality,
            ..
        })
    ));
}

#[test]
fn bounded_solution_is_unique_on_the_unit_line() {
    let g = unit_line(80);
    let exh = ball_exhaustion(&g, 0, &[40, 78], false).unwrap();
    let sol = minimal_h(&g, &point(&g, 0, -1.0), &exh, 1e-8, 3).unwrap();
    let outer = vec![1.0; 81];
    let mg = model_from_radial(outer.clone(), outer, TailAnnotations::default()).unwrap();
    let radial = radial_h(&mg, -1.0, 80).unwrap();
    for r in 0..=30 {
        let exact = GOLDEN.powi(r as i32);
        assert!((sol.limit[r] - exact).abs() < 1e-8);
        assert!((radial.h[r] - exact).abs() < 1e-8);
    }
}

#[test]
fn increasing_solution_on_an_incomplete_line() {
    let n = 400;
    let g = line(n, |r| ((r + 1) as f64).powi(2), |r| ((r + 1) as f64).powi(-2));
    let outer = (0..=n).map(|r| ((r + 1) as f64).powi(4)).collect();
    let m = (0..=n).map(|r| ((r + 1) as f64).powi(-2)).collect();
    let tails = TailAnnotations {
        sphere_measure: Some(Tail::power(2.0)),
        ..Default::default()
    };
    let mg = model_from_radial(outer, m, tails).unwrap();
    let v = increasing_solution(&mg, -1.0, n).unwrap();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    // Bounded: the increments are summable.
    assert!(v[n] - v[n / 2] < 1e-2 * v[n]);
    assert!(v[n] < 10.0);
    let interior: Vec<usize> = (1..n).collect();
    let res = lambda_harmonic_residual(&g, &v, -1.0, &interior).unwrap();
    // Each term is of size κ₊ v, so roundoff scales with (n+1)^4.
    assert!(res < 1e-13 * ((n + 1) as f64).powi(4) * v[n], "residual {res:e}");
    let exh = ball_exhaustion(&g, 0, &[n / 2, n - 2], false).unwrap();
    let sol = minimal_h(&g, &point(&g, 0, -1.0), &exh, 1e-6, 3).unwrap();
    assert!((1..n / 2).all(|r| sol.limit[r] < 1.0 && v[r] > 1.0));
}
