//! The exterior λ-harmonic problem `Δ̃h = λh` off a finite set `Ω`, `h = 1`
//! on `∂Ω`, solved along an exhaustion.
//!
//! `h_n` is the Dirichlet solution on `Ω_n` (zero on `∂Ω_n`); the family is
//! nondecreasing in `n` and its limit `h` vanishes at infinity exactly when
//! the graph is Feller.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::evidence::{Conclusion, Grade, ScEvidence};
use crate::graph::{metric_view, ExhaustionSequence, GraphError, MetricView, SubgraphRegion, Vertex, WeightedGraph};
use crate::linalg::{SolveError, SparseSymmetric};
use crate::values::VertexValues;

pub const DEFAULT_LAMBDA: f64 = -1.0;
pub const DEFAULT_BUFFER: usize = 3;
pub const DEFAULT_DECAY_TOL: f64 = 1e-3;
const SOLVE_TOL: f64 = 1e-10;
const MONOTONE_SLACK: f64 = 1e-12;
const PLATEAU_REL: f64 = 0.01;
const CONDITION_SLACK: f64 = 1e-10;
const CONFIRM_SLACK: f64 = 1e-8;
const SETTLED: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error("lambda must be negative, got {0}")]
    NonNegativeLambda(f64),
    #[error("omega is empty")]
    EmptyOmega,
    #[error("omega is not inside the interior of the region")]
    OmegaNotInsideRegion,
    #[error("linear solve failed: {0}")]
    SolverBreakdown(String),
    #[error("exhaustion monotonicity violated at vertex {vertex}")]
    MonotonicityViolation { vertex: String },
    #[error("only {available} usable annuli, need three")]
    InsufficientAnnuli { available: usize },
    #[error("no value at vertex {0}")]
    MissingValue(String),
    #[error("condition {condition:?} fails at vertex {vertex}")]
    ConditionViolated { vertex: String, condition: Condition },
    #[error("stochastic completeness evidence is required")]
    StochasticCompletenessNotEstablished,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<SolveError> for HarmonicError {
    fn from(e: SolveError) -> Self {
        HarmonicError::SolverBreakdown(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `Δ̃v ≥ λv` off `Ω`.
    SubInequality,
    /// `Δ̃v ≤ λv` off `Ω`.
    SuperInequality,
    /// `v ≥ 1` on `∂Ω`.
    BoundaryLower,
    /// `v ≤ 1` on `∂Ω`.
    BoundaryUpper,
    Positivity,
}

/// `Ω` together with `λ < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorProblem {
    pub omega: SubgraphRegion,
    pub lambda: f64,
}

impl ExteriorProblem {
    pub fn new(omega: SubgraphRegion, lambda: f64) -> Result<Self, HarmonicError> {
        if !(lambda < 0.0) || !lambda.is_finite() {
            return Err(HarmonicError::NonNegativeLambda(lambda));
        }
        if omega.is_empty() {
            return Err(HarmonicError::EmptyOmega);
        }
        Ok(Self { omega, lambda })
    }

    fn on_boundary(&self, x: Vertex) -> bool {
        self.omega.contains(x) && self.omega.boundary.binary_search(&x).is_ok()
    }
}

fn distance_from(g: &WeightedGraph, sources: &[Vertex]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Dirichlet solution `h_n` on `region`, as a value for every host vertex:
/// one on `Ω`, zero outside the interior of the region.
pub fn solve_hn(
    g: &WeightedGraph,
    problem: &ExteriorProblem,
    region: &SubgraphRegion,
) -> Result<Vec<f64>, HarmonicError> {
    if !problem.omega.members.iter().all(|&x| region.in_interior(x)) {
        return Err(HarmonicError::OmegaNotInsideRegion);
    }
    let unknowns: Vec<Vertex> = region
        .interior
        .iter()
        .copied()
        .filter(|&x| !problem.omega.contains(x))
        .collect();
    let mut pos = vec![usize::MAX; g.len()];
    for (i, &x) in unknowns.iter().enumerate() {
        pos[x] = i;
    }
    let n = unknowns.len();
    let mut a = SparseSymmetric::new(n);
    let mut rhs = vec![0.0; n];
    for (i, &x) in unknowns.iter().enumerate() {
        a.add_diagonal(i, g.total_weight(x) - problem.lambda * g.measure(x));
        for &(y, b) in g.neighbors(x) {
            if pos[y] != usize::MAX {
                if pos[y] > i {
                    a.add_off_diagonal(i, pos[y], -b);
                }
            } else if problem.omega.contains(y) {
                rhs[i] += b;
            }
        }
    }
    // Eliminate far vertices first: on trees this produces no fill.
    let dist = distance_from(g, &problem.omega.members);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(dist[unknowns[i]]), unknowns[i]));
    let sol = a.solve(&rhs, &order)?;
    let res = a.relative_residual(&sol, &rhs);
    if !(res <= SOLVE_TOL) {
        return Err(HarmonicError::SolverBreakdown(format!("relative residual {res:e}")));
    }
    let mut h = vec![0.0; g.len()];
    for &x in &problem.omega.members {
        h[x] = 1.0;
    }
    for (i, &x) in unknowns.iter().enumerate() {
        h[x] = sol[i];
    }
    Ok(h)
}

/// `max |Δ̃h − λh|` over `at`.
pub fn lambda_harmonic_residual<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    h: &F,
    lambda: f64,
    at: &[Vertex],
) -> Result<f64, HarmonicError> {
    let mut worst: f64 = 0.0;
    for &x in at {
        g.check(x)?;
        let hx = h
            .value(x)
            .ok_or_else(|| HarmonicError::MissingValue(g.name(x).into()))?;
        let mut s = 0.0;
        for &(y, b) in g.neighbors(x) {
            let hy = h
                .value(y)
                .ok_or_else(|| HarmonicError::MissingValue(g.name(y).into()))?;
            s += b * (hx - hy);
        }
        worst = worst.max((s / g.measure(x) - lambda * hx).abs());
    }
    Ok(worst)
}

/// Monotone family `h_n` and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSolution {
    pub lambda: f64,
    pub root: Vertex,
    pub omega_radius: usize,
    pub region_radii: Vec<usize>,
    /// `h_n` for every host vertex.
    pub per_region: Vec<Vec<f64>>,
    /// Sup of `h_n` over each sphere `S_r`, `r ≤` the region radius.
    pub sphere_profiles: Vec<Vec<f64>>,
    /// Best available estimate of `h`: the last `h_n`, a lower bound.
    pub limit: Vec<f64>,
    /// Max `|Δ̃h_n − λh_n|` over `int Ω_n ∖ Ω` of the last region.
    pub residual: f64,
    /// `(r, sup_{S_r} limit)` for radii clear of the cut by `buffer` spheres.
    pub decay_profile: Vec<(usize, f64)>,
    pub buffer: usize,
    pub converged: bool,
    /// `‖h_N − h_{N−1}‖_∞` for the last two regions.
    pub sup_gap: f64,
}

fn sphere_sups(mv: &MetricView, h: &[f64], radius: usize) -> Vec<f64> {
    (0..=radius.min(mv.radius()))
        .map(|r| mv.sphere(r).iter().map(|&x| h[x]).fold(0.0, f64::max))
        .collect()
}

pub fn minimal_h(
    g: &WeightedGraph,
    problem: &ExteriorProblem,
    exhaustion: &ExhaustionSequence,
    tol: f64,
    buffer: usize,
) -> Result<HarmonicSolution, HarmonicError> {
    let first = &exhaustion.regions[0];
    if !problem.omega.members.iter().all(|&x| first.in_interior(x)) {
        return Err(HarmonicError::OmegaNotInsideRegion);
    }
    let per_region: Vec<Vec<f64>> = exhaustion
        .regions
        .par_iter()
        .map(|r| solve_hn(g, problem, r))
        .collect::<Result<_, _>>()?;
    for w in per_region.windows(2) {
        if let Some(x) = (0..g.len()).find(|&x| w[1][x] < w[0][x] - MONOTONE_SLACK) {
            return Err(HarmonicError::MonotonicityViolation {
                vertex: g.name(x).into(),
            });
        }
    }
    let mv = metric_view(g, exhaustion.root)?;
    let omega_radius = problem.omega.members.iter().map(|&x| mv.distance[x]).max().unwrap_or(0);
    let sphere_profiles: Vec<Vec<f64>> = per_region
        .iter()
        .zip(&exhaustion.radii)
        .map(|(h, &r)| sphere_sups(&mv, h, r))
        .collect();
    let limit = per_region.last().cloned().unwrap_or_default();
    let last = exhaustion.last();
    let test: Vec<Vertex> = last
        .interior
        .iter()
        .copied()
        .filter(|&x| !problem.omega.contains(x))
        .collect();
    let residual = lambda_harmonic_residual(g, &limit, problem.lambda, &test)?;
    let n_last = *exhaustion.radii.last().unwrap();
    let decay_profile = sphere_profiles
        .last()
        .unwrap()
        .iter()
        .enumerate()
        .take((n_last + 1).saturating_sub(buffer))
        .map(|(r, &v)| (r, v))
        .collect();
    let sup_gap = match per_region.len() {
        0 | 1 => f64::INFINITY,
        n => per_region[n - 1]
            .iter()
            .zip(&per_region[n - 2])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
    };
    Ok(HarmonicSolution {
        lambda: problem.lambda,
        root: exhaustion.root,
        omega_radius,
        region_radii: exhaustion.radii.clone(),
        per_region,
        sphere_profiles,
        limit,
        residual,
        decay_profile,
        buffer,
        converged: sup_gap < tol,
        sup_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HEvidence {
    FellerEvidence,
    NonFellerEvidence,
    Inconclusive,
}

/// Outcome of the decay test on a truncated `h` profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HVerdict {
    pub evidence: HEvidence,
    /// Annuli used, `r_u/4`, `r_u/2`, `r_u` with `r_u` the last usable radius.
    pub annuli: Vec<usize>,
    pub values: Vec<f64>,
    pub relative_change: f64,
    pub decay_tol: f64,
    /// Whether the values were corrected for the `O(1/N)` bias of the cut.
    pub extrapolated: bool,
    pub grade: Grade,
}

/// Radial profile of `h_N` on `0..=N`, keyed by the truncation radius `N`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedProfile<'a> {
    pub radius: usize,
    pub values: &'a [f64],
}

/// Decay test shared by the full-graph and radial solvers.
///
/// When two truncations `N1 < N2` are available the values at radii up to
/// `N1 − buffer` are corrected as `(N2 h_{N2} − N1 h_{N1}) / (N2 − N1)`,
/// clipped to `[h_{N2}, 1]`. The annuli are spaced geometrically so a slow
/// power decay is not mistaken for a plateau.
pub fn verdict_from_profiles(
    last: TruncatedProfile<'_>,
    previous: Option<TruncatedProfile<'_>>,
    omega_radius: usize,
    decay_tol: f64,
    buffer: usize,
) -> Result<HVerdict, HarmonicError> {
    let (usable, corrected): (usize, Vec<f64>) = match previous {
        Some(p) if p.radius < last.radius => {
            let (n1, n2) = (p.radius as f64, last.radius as f64);
            let ru = p.radius.saturating_sub(buffer);
            let vals = (0..=ru)
                .map(|r| {
                    let (h1, h2) = (p.values[r], last.values[r]);
                    ((n2 * h2 - n1 * h1) / (n2 - n1)).clamp(h2, 1.0_f64.max(h2))
                })
                .collect();
            (ru, vals)
        }
        _ => {
            let ru = last.radius.saturating_sub(buffer);
            (ru, last.values[..=ru.min(last.values.len() - 1)].to_vec())
        }
    };
    let annuli = [usable / 4, usable / 2, usable];
    let distinct = annuli[0] >= 1 && annuli[0] < annuli[1] && usable > omega_radius;
    if !distinct {
        let available = [usable / 4, usable / 2, usable]
            .iter()
            .filter(|&&r| r > omega_radius)
            .count()
            .min(2);
        return Err(HarmonicError::InsufficientAnnuli { available });
    }
    let values: Vec<f64> = annuli.iter().map(|&r| corrected[r]).collect();
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let relative_change = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    let evidence = if values[2] < decay_tol {
        HEvidence::FellerEvidence
    } else if lo > decay_tol && relative_change < PLATEAU_REL {
        HEvidence::NonFellerEvidence
    } else {
        HEvidence::Inconclusive
    };
    Ok(HVerdict {
        evidence,
        annuli: annuli.to_vec(),
        values,
        relative_change,
        decay_tol,
        extrapolated: previous.is_some(),
        grade: Grade::TruncationScale,
    })
}

pub fn feller_verdict_from_h(sol: &HarmonicSolution, decay_tol: f64) -> Result<HVerdict, HarmonicError> {
    let n = sol.sphere_profiles.len();
    let profile = |i: usize| TruncatedProfile {
        radius: sol.region_radii[i],
        values: &sol.sphere_profiles[i],
    };
    let previous = (n >= 2).then(|| profile(n - 2));
    verdict_from_profiles(profile(n - 1), previous, sol.omega_radius, decay_tol, sol.buffer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Subsolution,
    Supersolution,
}

/// Result of checking a Khasminskii-type test function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunctionReport {
    pub kind: TestKind,
    pub vertices_checked: usize,
    /// Whether the comparison with a computed `h` held where it was tested.
    pub confirmed: Option<bool>,
    pub confirmed_vertices: usize,
    /// Sup of `v` over the outermost non-frontier sphere.
    pub tail_value: f64,
    pub decays: bool,
    pub conclusion: Conclusion,
    pub grade: Grade,
    pub note: String,
}

fn check_inequalities<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    v: &F,
    problem: &ExteriorProblem,
    kind: TestKind,
) -> Result<usize, HarmonicError> {
    let mut checked = 0;
    let missing = |x: Vertex| HarmonicError::MissingValue(g.name(x).into());
    let violated = |x: Vertex, condition| HarmonicError::ConditionViolated {
        vertex: g.name(x).into(),
        condition,
    };
    for x in 0..g.len() {
        if g.is_frontier(x) {
            continue;
        }
        let vx = v.value(x).ok_or_else(|| missing(x))?;
        if !(vx > 0.0) || !vx.is_finite() {
            return Err(violated(x, Condition::Positivity));
        }
        if problem.omega.contains(x) {
            if problem.on_boundary(x) {
                match kind {
                    TestKind::Subsolution if vx < 1.0 - MONOTONE_SLACK => {
                        return Err(violated(x, Condition::BoundaryLower))
                    }
                    TestKind::Supersolution if vx > 1.0 + MONOTONE_SLACK => {
                        return Err(violated(x, Condition::BoundaryUpper))
                    }
                    _ => {}
                }
            }
            continue;
        }
        let (mut s, mut scale) = (0.0, 0.0);
        for &(y, b) in g.neighbors(x) {
            let vy = v.value(y).ok_or_else(|| missing(y))?;
            s += b * (vx - vy);
            scale += b * (vx.abs() + vy.abs());
        }
        let m = g.measure(x);
        let lap = s / m;
        let rhs = problem.lambda * vx;
        let slack = CONDITION_SLACK * (scale / m + rhs.abs()).max(1.0);
        let ok = match kind {
            TestKind::Subsolution => lap >= rhs - slack,
            TestKind::Supersolution => lap <= rhs + slack,
        };
        if !ok {
            let c = match kind {
                TestKind::Subsolution => Condition::SubInequality,
                TestKind::Supersolution => Condition::SuperInequality,
            };
            return Err(violated(x, c));
        }
        checked += 1;
    }
    Ok(checked)
}

fn tail_value<F: VertexValues + ?Sized>(g: &WeightedGraph, v: &F, root: Vertex) -> Result<f64, HarmonicError> {
    let mv = metric_view(g, root)?;
    let outer = mv.frontier_radius(g).map_or(mv.radius(), |r| r.saturating_sub(1));
    Ok(mv
        .sphere(outer)
        .iter()
        .filter(|&&x| !g.is_frontier(x))
        .filter_map(|&x| v.value(x))
        .fold(0.0, f64::max))
}

/// Checks `Δ̃v ≥ λv` off `Ω` and `v ≥ 1` on `∂Ω` at every non-frontier vertex.
/// A subsolution dominates `h`; if it also decays the graph is Feller.
pub fn verify_subsolution<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    v: &F,
    problem: &ExteriorProblem,
    root: Vertex,
    reference: Option<&HarmonicSolution>,
    decay_tol: f64,
) -> Result<TestFunctionReport, HarmonicError> {
    let vertices_checked = check_inequalities(g, v, problem, TestKind::Subsolution)?;
    // h_N ≤ h ≤ v, so v ≥ h_N must hold wherever h_N is defined.
    let (confirmed, confirmed_vertices) = match reference {
        Some(sol) => {
            let h = &sol.limit;
            let mut count = 0;
            let mut ok = true;
            for x in (0..g.len()).filter(|&x| h[x] > 0.0) {
                if let Some(vx) = v.value(x) {
                    count += 1;
                    ok &= vx >= h[x] - CONFIRM_SLACK;
                }
            }
            (Some(ok), count)
        }
        None => (None, 0),
    };
    let tail = tail_value(g, v, root)?;
    let decays = tail < decay_tol;
    let (conclusion, note) = if decays {
        (Conclusion::Feller, "subsolution valid and decaying: Feller".to_string())
    } else {
        (Conclusion::None, "subsolution valid, no Feller conclusion".to_string())
    };
    Ok(TestFunctionReport {
        kind: TestKind::Subsolution,
        vertices_checked,
        confirmed,
        confirmed_vertices,
        tail_value: tail,
        decays,
        conclusion,
        grade: Grade::TruncationScale,
        note,
    })
}

/// Checks `Δ̃v ≤ λv` off `Ω` and `v ≤ 1` on `∂Ω`. On a stochastically complete
/// graph a bounded supersolution is dominated by `h`; if it does not decay the
/// graph is not Feller.
pub fn verify_supersolution<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    v: &F,
    problem: &ExteriorProblem,
    root: Vertex,
    sc_evidence: Option<&ScEvidence>,
    reference: Option<&HarmonicSolution>,
    decay_tol: f64,
) -> Result<TestFunctionReport, HarmonicError> {
    let sc = sc_evidence.ok_or(HarmonicError::StochasticCompletenessNotEstablished)?;
    let vertices_checked = check_inequalities(g, v, problem, TestKind::Supersolution)?;
    // Only h_{N} values that have stopped moving approximate h from below well
    // enough to compare with v.
    let (confirmed, confirmed_vertices) = match reference {
        Some(sol) if sol.per_region.len() >= 2 => {
            let n = sol.per_region.len();
            let (a, b) = (&sol.per_region[n - 2], &sol.per_region[n - 1]);
            let mut count = 0;
            let mut ok = true;
            for x in (0..g.len()).filter(|&x| b[x] > 0.0 && (b[x] - a[x]).abs() < SETTLED) {
                if let Some(vx) = v.value(x) {
                    count += 1;
                    ok &= b[x] >= vx - CONFIRM_SLACK;
                }
            }
            (Some(ok), count)
        }
        _ => (None, 0),
    };
    let tail = tail_value(g, v, root)?;
    let decays = tail < decay_tol;
    let (conclusion, note) = if decays {
        (
            Conclusion::None,
            "supersolution valid but decaying, no conclusion".to_string(),
        )
    } else {
        (
            Conclusion::NotFeller,
            format!("supersolution valid and bounded below at infinity: not Feller, conditional on stochastic completeness ({})", sc.note),
        )
    };
    Ok(TestFunctionReport {
        kind: TestKind::Supersolution,
        vertices_checked,
        confirmed,
        confirmed_vertices,
        tail_value: tail,
        decays,
        conclusion,
        grade: Grade::TruncationScale.weakest(sc.grade),
        note,
    })
}
