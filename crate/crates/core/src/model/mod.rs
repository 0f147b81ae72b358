//! Weakly spherically symmetric graphs described by radial data.
//!
//! A model is given by `κ̃₊(r)` and `m(S_r)` for `0 ≤ r < L`. The rest follows:
//! `∂B_r = κ̃₊(r) m(S_r)` and `κ̃₋(r+1) = ∂B_r / m(S_{r+1})`.

mod format;
pub mod series;

use serde::Serialize;
use thiserror::Error;

pub use format::{parse_model, write_model};
pub use series::{
    hurwitz_zeta, series_verdict, SeriesBasis, SeriesId, SeriesStatus, SeriesVerdict, Tail, TailAnnotations, TailKind,
};

use crate::evidence::{Conclusion, Grade};
use crate::graph::{curvature_from_metric, metric_view, GraphError, Vertex, WeightedGraph};
use crate::harmonic::{verdict_from_profiles, HVerdict, HarmonicError, TruncatedProfile};
use crate::linalg::solve_tridiagonal;

const DETECT_SPREAD: f64 = 1e-10;
const RECURSION_TOL: f64 = 1e-10;
const BRACKET_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{field} is not positive at r = {r}")]
    NonPositiveEntry { field: &'static str, r: usize },
    #[error("model length {0} is below 3")]
    LengthTooShort(usize),
    #[error("radial sequences have different lengths")]
    LengthMismatch,
    #[error("not a model at this root: {curvature} curvature varies on sphere {sphere} (spread {spread:e})")]
    NotAModel {
        sphere: usize,
        curvature: &'static str,
        spread: f64,
    },
    #[error("series needs at least 16 terms, got {0}")]
    TooFewTerms(usize),
    #[error("series {0:?} is inconclusive")]
    InconclusiveSeries(SeriesId),
    #[error("radial solve failed: {0}")]
    SolverBreakdown(String),
    #[error("truncations disagree by {gap:e} on the inner half (tolerance {tol:e})")]
    NotConvergedAtTruncation { gap: f64, tol: f64 },
    #[error("lambda must be negative, got {0}")]
    NonNegativeLambda(f64),
    #[error("radius {n} outside 1..={max}")]
    RadiusOutOfRange { n: usize, max: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelGraph {
    pub outer_curv: Vec<f64>,
    pub inner_curv: Vec<f64>,
    pub sphere_measure: Vec<f64>,
    pub boundary_area: Vec<f64>,
    pub tails: TailAnnotations,
}

pub fn model_from_radial(
    outer_curv: Vec<f64>,
    sphere_measure: Vec<f64>,
    tails: TailAnnotations,
) -> Result<ModelGraph, ModelError> {
    if outer_curv.len() != sphere_measure.len() {
        return Err(ModelError::LengthMismatch);
    }
    let len = outer_curv.len();
    if len < 3 {
        return Err(ModelError::LengthTooShort(len));
    }
    for (field, seq) in [("outer curvature", &outer_curv), ("sphere measure", &sphere_measure)] {
        if let Some(r) = seq.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(ModelError::NonPositiveEntry { field, r });
        }
    }
    let boundary_area: Vec<f64> = outer_curv.iter().zip(&sphere_measure).map(|(k, m)| k * m).collect();
    let mut inner_curv = vec![0.0; len];
    for r in 1..len {
        inner_curv[r] = boundary_area[r - 1] / sphere_measure[r];
    }
    Ok(ModelGraph {
        outer_curv,
        inner_curv,
        sphere_measure,
        boundary_area,
        tails,
    })
}

/// How `m(B_r^c)` is obtained beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMeasureBasis {
    /// Closed-form sum from the sphere-measure annotation.
    Closed,
    /// Only the stored spheres are summed: a lower bound.
    Truncated,
    /// Total measure is infinite.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureTail {
    pub basis: TailMeasureBasis,
    pub grade: Grade,
    /// `Σ_{k ≥ L} m(S_k)`, zero when unknown, infinite when the measure is.
    pub beyond: f64,
}

impl ModelGraph {
    pub fn length(&self) -> usize {
        self.outer_curv.len()
    }

    pub fn ball_measure(&self, r: usize) -> f64 {
        self.sphere_measure[..=r.min(self.length() - 1)].iter().sum()
    }

    pub fn measure_tail(&self) -> Result<MeasureTail, ModelError> {
        let l = self.length();
        let last = self.sphere_measure[l - 1];
        if let Some(t) = self.tails.sphere_measure {
            if !t.summable() {
                return Ok(MeasureTail {
                    basis: TailMeasureBasis::Infinite,
                    grade: Grade::Certified,
                    beyond: f64::INFINITY,
                });
            }
            let beyond = match t.kind {
                TailKind::Power => last * (l as f64).powf(t.exponent) * hurwitz_zeta(t.exponent, l as f64 + 1.0),
                TailKind::Exp => {
                    let q = (-t.exponent).exp();
                    last * q / (1.0 - q)
                }
            };
            return Ok(MeasureTail {
                basis: TailMeasureBasis::Closed,
                grade: Grade::Certified,
                beyond,
            });
        }
        if l < series::MIN_TERMS {
            return Ok(MeasureTail {
                basis: TailMeasureBasis::Truncated,
                grade: Grade::TruncationScale,
                beyond: 0.0,
            });
        }
        let v = series_verdict(&self.sphere_measure, None)?;
        match v.status.convergent() {
            Some(false) => Ok(MeasureTail {
                basis: TailMeasureBasis::Infinite,
                grade: v.status.grade(),
                beyond: f64::INFINITY,
            }),
            Some(true) => Ok(MeasureTail {
                basis: TailMeasureBasis::Truncated,
                grade: Grade::Heuristic,
                beyond: 0.0,
            }),
            None => Ok(MeasureTail {
                basis: TailMeasureBasis::Truncated,
                grade: Grade::TruncationScale,
                beyond: 0.0,
            }),
        }
    }

    /// `m(B_r^c) = Σ_{k > r} m(S_k)` including the closed tail when known.
    pub fn complement_measure(&self, r: usize, tail: &MeasureTail) -> f64 {
        if tail.basis == TailMeasureBasis::Infinite {
            return f64::INFINITY;
        }
        let l = self.length();
        let head: f64 = if r + 1 < l {
            self.sphere_measure[r + 1..].iter().sum()
        } else {
            0.0
        };
        head + tail.beyond
    }

    /// Largest violation of `κ̃₊(r) m(S_r) = κ̃₋(r+1) m(S_{r+1})`, relative.
    pub fn compatibility_error(&self) -> f64 {
        (0..self.length() - 1)
            .map(|r| {
                let a = self.outer_curv[r] * self.sphere_measure[r];
                let b = self.inner_curv[r + 1] * self.sphere_measure[r + 1];
                (a - b).abs() / a.abs().max(b.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Radial data of `g` at `root`, if the curvatures are constant on every
/// sphere before the frontier.
pub fn detect_model(g: &WeightedGraph, root: Vertex) -> Result<ModelGraph, ModelError> {
    let mv = metric_view(g, root)?;
    let k = curvature_from_metric(g, &mv);
    let len = mv.frontier_radius(g).unwrap_or(mv.radius() + 1);
    let spread = |vals: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let s = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        (hi, s)
    };
    let mut outer = Vec::with_capacity(len);
    let mut sphere_measure = Vec::with_capacity(len);
    for r in 0..len {
        let s = mv.sphere(r);
        let (kp, sp) = spread(&mut s.iter().map(|&x| k.outer[x]));
        if sp > DETECT_SPREAD {
            return Err(ModelError::NotAModel {
                sphere: r,
                curvature: "outer",
                spread: sp,
            });
        }
        let (_, sm) = spread(&mut s.iter().map(|&x| k.inner[x]));
        if sm > DETECT_SPREAD {
            return Err(ModelError::NotAModel {
                sphere: r,
                curvature: "inner",
                spread: sm,
            });
        }
        outer.push(kp);
        sphere_measure.push(s.iter().map(|&x| g.measure(x)).sum());
    }
    let mg = model_from_radial(outer, sphere_measure, TailAnnotations::default())?;
    for r in 1..len {
        let measured = k.inner[mv.sphere(r)[0]];
        let derived = mg.inner_curv[r];
        let rel = (measured - derived).abs() / measured.abs().max(derived.abs());
        if rel > DETECT_SPREAD {
            return Err(ModelError::NotAModel {
                sphere: r,
                curvature: "inner",
                spread: rel,
            });
        }
    }
    Ok(mg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FellerCase {
    /// `Σ 1/∂B_r < ∞`.
    Transient,
    /// `Σ 1/∂B_r = ∞` and `Σ m(B_r^c)/∂B_r = ∞`.
    DivergentTail,
    /// `Σ 1/∂B_r = ∞` and `Σ m(B_r^c)/∂B_r < ∞`.
    ConvergentTail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FellerClassification {
    pub outcome: Conclusion,
    pub case: FellerCase,
    pub grade: Grade,
    pub inv_boundary: SeriesVerdict,
    pub tail_measure_over_boundary: Option<SeriesVerdict>,
    pub measure_tail: MeasureTail,
}

fn inv_boundary_series(mg: &ModelGraph) -> Result<SeriesVerdict, ModelError> {
    let terms: Vec<f64> = mg.boundary_area.iter().map(|b| 1.0 / b).collect();
    Ok(series_verdict(&terms, mg.tails.inv_boundary)?.with_id(SeriesId::InvBoundary))
}

fn tail_series(mg: &ModelGraph, tail: &MeasureTail) -> Result<SeriesVerdict, ModelError> {
    let id = SeriesId::TailMeasureOverBoundary;
    if tail.basis == TailMeasureBasis::Infinite {
        let status = if tail.grade == Grade::Certified {
            SeriesStatus::DivergentCertified
        } else {
            SeriesStatus::DivergentHeuristic
        };
        let len = mg.length();
        return Ok(SeriesVerdict {
            series_id: Some(id),
            status,
            partial_sums: vec![f64::INFINITY; len],
            basis: SeriesBasis::InfiniteTerms { grade: tail.grade },
        });
    }
    // With only the truncated tail the last term would be zero.
    let count = match tail.basis {
        TailMeasureBasis::Truncated => mg.length() - 1,
        _ => mg.length(),
    };
    let terms: Vec<f64> = (0..count)
        .map(|r| mg.complement_measure(r, tail) / mg.boundary_area[r])
        .collect();
    // With a truncated tail the stored terms are lower bounds; an annotation
    // still speaks for the full series.
    Ok(series_verdict(&terms, mg.tails.tail_measure_over_boundary)?.with_id(id))
}

/// Feller trichotomy for models.
pub fn classify_feller(mg: &ModelGraph) -> Result<FellerClassification, ModelError> {
    let inv = inv_boundary_series(mg)?;
    let measure_tail = mg.measure_tail()?;
    let tail = tail_series(mg, &measure_tail).ok();
    match inv.status.convergent() {
        None => Err(ModelError::InconclusiveSeries(SeriesId::InvBoundary)),
        Some(true) => Ok(FellerClassification {
            outcome: Conclusion::Feller,
            case: FellerCase::Transient,
            grade: inv.status.grade(),
            inv_boundary: inv,
            tail_measure_over_boundary: tail,
            measure_tail,
        }),
        Some(false) => {
            let t = tail.ok_or(ModelError::InconclusiveSeries(SeriesId::TailMeasureOverBoundary))?;
            let (outcome, case) = match t.status.convergent() {
                None => return Err(ModelError::InconclusiveSeries(SeriesId::TailMeasureOverBoundary)),
                Some(false) => (Conclusion::Feller, FellerCase::DivergentTail),
                Some(true) => (Conclusion::NotFeller, FellerCase::ConvergentTail),
            };
            Ok(FellerClassification {
                outcome,
                case,
                grade: inv.status.grade().weakest(t.status.grade()),
                inv_boundary: inv,
                tail_measure_over_boundary: Some(t),
                measure_tail,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesClassification {
    /// Stochastically complete, or transient, depending on the question.
    pub holds: bool,
    pub grade: Grade,
    pub series: SeriesVerdict,
}

/// Stochastically complete iff `Σ m(B_r)/∂B_r = ∞`.
pub fn classify_stochastic_completeness(mg: &ModelGraph) -> Result<SeriesClassification, ModelError> {
    let id = SeriesId::BallMeasureOverBoundary;
    let terms: Vec<f64> = (0..mg.length())
        .map(|r| mg.ball_measure(r) / mg.boundary_area[r])
        .collect();
    let series = series_verdict(&terms, mg.tails.ball_measure_over_boundary)?.with_id(id);
    let conv = series.status.convergent().ok_or(ModelError::InconclusiveSeries(id))?;
    Ok(SeriesClassification {
        holds: !conv,
        grade: series.status.grade(),
        series,
    })
}

/// Transient iff `Σ 1/∂B_r < ∞`.
pub fn classify_transience(mg: &ModelGraph) -> Result<SeriesClassification, ModelError> {
    let series = inv_boundary_series(mg)?;
    let conv = series
        .status
        .convergent()
        .ok_or(ModelError::InconclusiveSeries(SeriesId::InvBoundary))?;
    Ok(SeriesClassification {
        holds: conv,
        grade: series.status.grade(),
        series,
    })
}

/// Radial Dirichlet solve with recursion and monotonicity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub lambda: f64,
    pub omega_radius: usize,
    pub n: usize,
    /// `h(0..=n)`, with `h(n) = 0`.
    pub h: Vec<f64>,
    /// `f(r) = ∂B_r (h(r) − h(r+1))` for `0 ≤ r < n`.
    pub f: Vec<f64>,
    /// Max of `|f(r) − f(r−1) − λ h(r) m(S_r)|` relative to `max f`.
    pub recursion_residual: f64,
    pub strictly_decreasing: bool,
    pub f_positive_decreasing: bool,
}

fn check_lambda(lambda: f64) -> Result<(), ModelError> {
    if lambda < 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonNegativeLambda(lambda))
    }
}

/// How the radial system is closed at the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Closure {
    /// `h(n) = 0`.
    Dirichlet,
    /// `h(n+1) = θ h(n)` with `θ = ∂B_n / (∂B_n + |λ| m(B_n^c))`: the
    /// outflow `f(n)` is carried by a tail on which `h` is frozen at `h(n+1)`.
    TailFlux { complement_measure: f64 },
}

/// Solves for `h(r)` with `h = 1` on `r ≤ k`. With the Dirichlet closure the
/// unknowns are `k+1..n−1`; with the tail-flux closure they are `k+1..=n` and
/// the result carries `h(n+1)` as well.
fn radial_system(mg: &ModelGraph, lambda: f64, k: usize, n: usize, closure: Closure) -> Result<Vec<f64>, ModelError> {
    let last = match closure {
        Closure::Dirichlet => n - 1,
        Closure::TailFlux { .. } => n,
    };
    let mut h = vec![1.0; k + 1];
    if last > k {
        let size = last - k;
        let (mut sub, mut dia, mut sup, mut rhs) = (vec![0.0; size], vec![0.0; size], vec![0.0; size], vec![0.0; size]);
        for (i, r) in (k + 1..=last).enumerate() {
            let (kp, km) = (mg.outer_curv[r], mg.inner_curv[r]);
            dia[i] = kp + km - lambda;
            sub[i] = -km;
            sup[i] = -kp;
            if i == 0 {
                rhs[i] = km;
            }
        }
        if let Closure::TailFlux { complement_measure } = closure {
            let b = mg.boundary_area[n];
            let theta = b / (b + lambda.abs() * complement_measure);
            dia[size - 1] -= mg.outer_curv[n] * theta;
        }
        let sol = solve_tridiagonal(&sub, &dia, &sup, &rhs).map_err(|e| ModelError::SolverBreakdown(e.to_string()))?;
        h.extend(sol);
    }
    match closure {
        Closure::Dirichlet => h.push(0.0),
        Closure::TailFlux { complement_measure } => {
            let b = mg.boundary_area[n];
            let theta = b / (b + lambda.abs() * complement_measure);
            let hn = *h.last().unwrap();
            h.push(theta * hn);
        }
    }
    Ok(h)
}

fn radial_diagnostics(mg: &ModelGraph, lambda: f64, k: usize, n: usize, h: Vec<f64>, levels: usize) -> RadialSolution {
    let f: Vec<f64> = (0..levels).map(|r| mg.boundary_area[r] * (h[r] - h[r + 1])).collect();
    let scale = f.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let recursion_residual = (k + 1..levels)
        .map(|r| (f[r] - f[r - 1] - lambda * h[r] * mg.sphere_measure[r]).abs())
        .fold(0.0, f64::max)
        / scale;
    let strictly_decreasing = h[k..].windows(2).all(|w| w[1] < w[0]) && h.iter().take(n).all(|&v| v > 0.0 && v <= 1.0);
    let f_positive_decreasing = f[k..].iter().all(|&v| v > 0.0) && f[k..].windows(2).all(|w| w[1] < w[0]);
    RadialSolution {
        lambda,
        omega_radius: k,
        n,
        h,
        f,
        recursion_residual,
        strictly_decreasing,
        f_positive_decreasing,
    }
}

pub fn radial_h(mg: &ModelGraph, lambda: f64, n: usize) -> Result<RadialSolution, ModelError> {
    radial_h_from(mg, lambda, 0, n)
}

/// Radial Dirichlet solution with `Ω = B_k`.
pub fn radial_h_from(mg: &ModelGraph, lambda: f64, k: usize, n: usize) -> Result<RadialSolution, ModelError> {
    check_lambda(lambda)?;
    let max = mg.length() - 1;
    if n <= k || n > max {
        return Err(ModelError::RadiusOutOfRange { n, max });
    }
    let h = radial_system(mg, lambda, k, n, Closure::Dirichlet)?;
    let sol = radial_diagnostics(mg, lambda, k, n, h, n);
    if !(sol.recursion_residual <= RECURSION_TOL) {
        return Err(ModelError::SolverBreakdown(format!(
            "recursion residual {:e}",
            sol.recursion_residual
        )));
    }
    Ok(sol)
}

/// Limiting radial profile from two truncations `n/2` and `n = L − 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialLimit {
    pub lambda: f64,
    pub omega_radius: usize,
    pub closure: Closure,
    pub coarse: RadialSolution,
    pub fine: RadialSolution,
    /// Estimate of `lim_{s→∞} h(s)`: `h(n+1)` under the tail-flux closure, zero otherwise.
    pub limit_at_infinity: f64,
    /// `max_{r ≤ n/4} |h_fine(r) − h_coarse(r)|`.
    pub gap: f64,
    pub bracket_holds: bool,
    pub bracket_violation: f64,
    /// `f(n)/f(0)`; small when the outflow vanishes at infinity.
    pub flux_ratio: f64,
    pub measure_tail: MeasureTail,
}

/// Chooses a closure: the tail-flux closure when `Σ 1/∂B_r` diverges and the
/// measure is finite, the Dirichlet closure otherwise.
pub fn radial_limit_h(mg: &ModelGraph, lambda: f64, tol: f64) -> Result<RadialLimit, ModelError> {
    radial_limit_h_from(mg, lambda, 0, tol)
}

pub fn radial_limit_h_from(mg: &ModelGraph, lambda: f64, k: usize, tol: f64) -> Result<RadialLimit, ModelError> {
    check_lambda(lambda)?;
    let n2 = mg.length() - 1;
    let n1 = n2 / 2;
    if n1 <= k + 1 {
        return Err(ModelError::RadiusOutOfRange { n: n1, max: n2 });
    }
    let measure_tail = mg.measure_tail()?;
    let recurrent = inv_boundary_series(mg)?.status.convergent() == Some(false);
    let finite = measure_tail.basis != TailMeasureBasis::Infinite;
    let closure_at = |n: usize| {
        if recurrent && finite {
            Closure::TailFlux {
                complement_measure: mg.complement_measure(n, &measure_tail),
            }
        } else {
            Closure::Dirichlet
        }
    };
    let solve = |n: usize| -> Result<RadialSolution, ModelError> {
        let closure = closure_at(n);
        let h = radial_system(mg, lambda, k, n, closure)?;
        let levels = match closure {
            Closure::Dirichlet => n,
            Closure::TailFlux { .. } => n + 1,
        };
        let sol = radial_diagnostics(mg, lambda, k, n, h, levels);
        if !(sol.recursion_residual <= RECURSION_TOL) {
            return Err(ModelError::SolverBreakdown(format!(
                "recursion residual {:e}",
                sol.recursion_residual
            )));
        }
        Ok(sol)
    };
    let (coarse, fine) = (solve(n1)?, solve(n2)?);
    let gap = (0..=n1 / 2)
        .map(|r| (fine.h[r] - coarse.h[r]).abs())
        .fold(0.0, f64::max);
    if !(gap < tol) {
        return Err(ModelError::NotConvergedAtTruncation { gap, tol });
    }
    let closure = closure_at(n2);
    let limit_at_infinity = match closure {
        Closure::TailFlux { .. } => fine.h[n2 + 1],
        Closure::Dirichlet => 0.0,
    };
    let mut violation: f64 = 0.0;
    for (r, &f) in fine.f.iter().enumerate().skip(k) {
        let mc = mg.complement_measure(r, &measure_tail);
        let lower = if limit_at_infinity > 0.0 {
            -lambda * limit_at_infinity * mc
        } else {
            0.0
        };
        let upper = -lambda * fine.h[r + 1] * mc;
        let scale = f.abs().max(f64::MIN_POSITIVE);
        violation = violation.max((lower - f) / scale).max((f - upper) / scale);
    }
    let flux_ratio = fine.f.last().copied().unwrap_or(0.0) / fine.f[k];
    Ok(RadialLimit {
        lambda,
        omega_radius: k,
        closure,
        coarse,
        fine,
        limit_at_infinity,
        gap,
        bracket_holds: violation <= BRACKET_TOL,
        bracket_violation: violation,
        flux_ratio,
        measure_tail,
    })
}

/// Decay test on a radial limit. Under the Dirichlet closure the two
/// truncations are combined to remove the bias of the cut.
pub fn radial_verdict(limit: &RadialLimit, decay_tol: f64, buffer: usize) -> Result<HVerdict, ModelError> {
    let fine = TruncatedProfile {
        radius: limit.fine.n,
        values: &limit.fine.h,
    };
    let coarse = TruncatedProfile {
        radius: limit.coarse.n,
        values: &limit.coarse.h,
    };
    let previous = match limit.closure {
        Closure::Dirichlet => Some(coarse),
        Closure::TailFlux { .. } => None,
    };
    Ok(verdict_from_profiles(
        fine,
        previous,
        limit.omega_radius,
        decay_tol,
        buffer,
    )?)
}

/// The increasing solution of `Δ̃v = λv` on the whole model with `v(0) = 1`,
/// by forward recursion. It stays bounded exactly on stochastically
/// incomplete models.
pub fn increasing_solution(mg: &ModelGraph, lambda: f64, n: usize) -> Result<Vec<f64>, ModelError> {
    check_lambda(lambda)?;
    let max = mg.length() - 1;
    if n == 0 || n > max {
        return Err(ModelError::RadiusOutOfRange { n, max });
    }
    let mut v = vec![1.0, 1.0 - lambda / mg.outer_curv[0]];
    for r in 1..n {
        let (kp, km) = (mg.outer_curv[r], mg.inner_curv[r]);
        let next = ((kp + km - lambda) * v[r] - km * v[r - 1]) / kp;
        v.push(next);
    }
    Ok(v)
}
