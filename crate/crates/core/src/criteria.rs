//! Sufficient conditions for the Feller property on general graphs, checked
//! on a truncation.
//!
//! Every check only looks at non-frontier vertices. Universal hypotheses on
//! infinite graphs can only be sampled, so conclusions carry
//! [`Grade::TruncationScale`] unless stated otherwise.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::evidence::{Conclusion, Grade, ScEvidence};
use crate::graph::{curvature_field, curvature_from_metric, metric_view, GraphError, Vertex, WeightedGraph};
use crate::model::{FellerClassification, ModelGraph};

/// Default finite-set cutoff: spheres `r ≤ R` are ignored.
pub const DEFAULT_CUTOFF: usize = 2;
const REL_SLACK: f64 = 1e-12;
const VANISHING_RATIO: f64 = 0.5;
const MEASURE_DROP: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("twist function declared {declared:?} but behaves as {observed:?} on the truncation")]
    WrongTwistKind { declared: TwistKind, observed: TwistKind },
    #[error("criterion needs a {required:?} twist function, got {declared:?}")]
    TwistKindMismatch { required: TwistKind, declared: TwistKind },
    #[error("twist function must be positive and strictly decreasing, fails at r = {r}")]
    TwistNotDecreasing { r: usize },
    #[error("twist function covers radii {start}..{end}, need {needed}")]
    TwistTooShort { start: usize, end: usize, needed: usize },
    #[error("stochastic completeness has not been established")]
    StochasticCompletenessNotEstablished,
    #[error("model graph has not been classified")]
    ModelNotClassified,
    #[error("no base points given")]
    EmptyBasePoints,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionId {
    UniformCurvatureBound,
    BoundedOperator,
    MeasureDivergence,
    TwistedFeller,
    TwistedNonFeller,
    CompareToModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applies {
    Yes,
    No,
    InconclusiveAtTruncation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Witness {
    /// A vertex where the inequality fails. `lhs` and `rhs` are the two sides
    /// of the failing inequality.
    Vertex {
        vertex: Vertex,
        radius: usize,
        base_point: Vertex,
        lhs: f64,
        rhs: f64,
    },
    /// A geodesic ray from the root along which the measure decays.
    Ray { vertices: Vec<Vertex>, measures: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion_id: CriterionId,
    pub applies: Applies,
    pub witness: Option<Witness>,
    pub conclusion: Conclusion,
    pub grade: Option<Grade>,
    pub scope_note: String,
}

impl CriterionReport {
    fn yes(id: CriterionId, conclusion: Conclusion, grade: Grade, scope_note: String) -> Self {
        Self {
            criterion_id: id,
            applies: Applies::Yes,
            witness: None,
            conclusion,
            grade: Some(grade),
            scope_note,
        }
    }

    fn not_applicable(id: CriterionId, applies: Applies, witness: Option<Witness>, scope_note: String) -> Self {
        Self {
            criterion_id: id,
            applies,
            witness,
            conclusion: Conclusion::None,
            grade: None,
            scope_note,
        }
    }
}

fn within(lhs: f64, rhs: f64, scale: f64) -> bool {
    lhs <= rhs + REL_SLACK * scale.max(f64::MIN_POSITIVE)
}

/// Base points `B_{radius/2}(root)` without frontier vertices.
pub fn sampled_base_points(g: &WeightedGraph, root: Vertex, radius: usize) -> Result<Vec<Vertex>, CriteriaError> {
    let mv = metric_view(g, root)?;
    let mut pts: Vec<Vertex> = mv.ball(radius / 2).into_iter().filter(|&x| !g.is_frontier(x)).collect();
    pts.sort_unstable();
    Ok(pts)
}

/// Checks `κ₊(x) − κ₋(x) ≤ K` for every sampled base point and every
/// non-frontier `x`. With `require_all_basepoints` the conclusion is withheld
/// unless every non-frontier vertex was used as a base point.
pub fn uniform_curvature_bound(
    g: &WeightedGraph,
    k: f64,
    base_points: &[Vertex],
    require_all_basepoints: bool,
) -> Result<CriterionReport, CriteriaError> {
    let id = CriterionId::UniformCurvatureBound;
    if base_points.is_empty() {
        return Err(CriteriaError::EmptyBasePoints);
    }
    for &x0 in base_points {
        g.check(x0)?;
    }
    let failures: Vec<Option<Witness>> = base_points
        .par_iter()
        .map(|&x0| -> Result<Option<Witness>, CriteriaError> {
            let mv = metric_view(g, x0)?;
            let kf = curvature_from_metric(g, &mv);
            let mut worst: Option<(f64, Witness)> = None;
            for x in (0..g.len()).filter(|&x| kf.reliable[x]) {
                let diff = kf.outer[x] - kf.inner[x];
                if !within(diff, k, kf.outer[x].max(kf.inner[x]).max(k.abs())) {
                    let excess = diff - k;
                    if worst.as_ref().is_none_or(|(e, _)| excess > *e) {
                        let w = Witness::Vertex {
                            vertex: x,
                            radius: mv.distance[x],
                            base_point: x0,
                            lhs: diff,
                            rhs: k,
                        };
                        worst = Some((excess, w));
                    }
                }
            }
            Ok(worst.map(|(_, w)| w))
        })
        .collect::<Result<_, _>>()?;
    let interior = (0..g.len()).filter(|&x| !g.is_frontier(x)).count();
    let mut sampled: Vec<Vertex> = base_points.to_vec();
    sampled.sort_unstable();
    sampled.dedup();
    let scope_note = format!(
        "{} of {} non-frontier vertices used as base points (sampled, not all x0); bound K = {k}",
        sampled.len(),
        interior
    );
    if let Some(w) = failures.into_iter().flatten().next() {
        return Ok(CriterionReport::not_applicable(id, Applies::No, Some(w), scope_note));
    }
    let complete = sampled.iter().filter(|&&x| !g.is_frontier(x)).count() == interior;
    if require_all_basepoints && !complete {
        let note = format!("{scope_note}; conclusion withheld because every base point is required");
        return Ok(CriterionReport::not_applicable(
            id,
            Applies::InconclusiveAtTruncation,
            None,
            note,
        ));
    }
    Ok(CriterionReport::yes(
        id,
        Conclusion::Feller,
        Grade::TruncationScale,
        scope_note,
    ))
}

/// `sup deg ≤ bound` over non-frontier vertices. Since
/// `κ₊ − κ₋ ≤ deg` for every base point, this implies the uniform bound.
pub fn bounded_operator_check(g: &WeightedGraph, bound: f64) -> CriterionReport {
    let id = CriterionId::BoundedOperator;
    let worst = (0..g.len())
        .filter(|&x| !g.is_frontier(x))
        .map(|x| (x, g.total_weight(x) / g.measure(x)))
        .fold(None, |acc: Option<(Vertex, f64)>, (x, d)| match acc {
            Some((_, best)) if best >= d => acc,
            _ => Some((x, d)),
        });
    let Some((x, sup)) = worst else {
        return CriterionReport::not_applicable(
            id,
            Applies::InconclusiveAtTruncation,
            None,
            "no non-frontier vertices".into(),
        );
    };
    let scope_note = format!(
        "sup of deg over {} non-frontier vertices is {sup}",
        g.len() - g.frontier().count()
    );
    if within(sup, bound, bound.abs().max(sup)) {
        CriterionReport::yes(id, Conclusion::Feller, Grade::TruncationScale, scope_note)
    } else {
        let w = Witness::Vertex {
            vertex: x,
            radius: 0,
            base_point: x,
            lhs: sup,
            rhs: bound,
        };
        CriterionReport::not_applicable(id, Applies::No, Some(w), scope_note)
    }
}

/// Divergence of `Σ m(x_n)` along every sequence `x_n → ∞`, observed through
/// the smallest measure on each sphere. A marked drop between the middle and
/// outer quarter of the truncation is reported with a ray along which the
/// measure decays.
pub fn measure_divergence_check(g: &WeightedGraph, root: Vertex) -> Result<CriterionReport, CriteriaError> {
    let id = CriterionId::MeasureDivergence;
    let mv = metric_view(g, root)?;
    let last = mv.frontier_radius(g).map_or(mv.radius(), |r| r.saturating_sub(1));
    let min_on: Vec<(Vertex, f64)> = (0..=last)
        .map(|r| {
            mv.sphere(r)
                .iter()
                .filter(|&&x| !g.is_frontier(x))
                .map(|&x| (x, g.measure(x)))
                .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
        })
        .collect();
    if last < 4 {
        let note = format!("only {} spheres before the frontier", last + 1);
        return Ok(CriterionReport::not_applicable(
            id,
            Applies::InconclusiveAtTruncation,
            None,
            note,
        ));
    }
    let quarter = |a: usize, b: usize| min_on[a..b].iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let n = last + 1;
    let middle = quarter(n / 4, n / 2);
    let outer = quarter(3 * n / 4, n);
    let scope_note = format!("sphere minima of m on radii 0..={last}: {middle:e} mid, {outer:e} outer");
    if outer >= MEASURE_DROP * middle {
        return Ok(CriterionReport::yes(
            id,
            Conclusion::Feller,
            Grade::TruncationScale,
            scope_note,
        ));
    }
    // Walk back from the lightest vertex of the last sphere.
    let mut x = min_on[last].0;
    let mut ray = vec![x];
    while mv.distance[x] > 0 {
        let r = mv.distance[x];
        x = g
            .neighbors(x)
            .iter()
            .filter(|(y, _)| mv.distance[*y] + 1 == r)
            .map(|&(y, _)| y)
            .min_by(|&a, &b| g.measure(a).total_cmp(&g.measure(b)))
            .expect("geodesic predecessor");
        ray.push(x);
    }
    ray.reverse();
    let measures = ray.iter().map(|&v| g.measure(v)).collect();
    let w = Witness::Ray {
        vertices: ray,
        measures,
    };
    Ok(CriterionReport::not_applicable(
        id,
        Applies::InconclusiveAtTruncation,
        Some(w),
        scope_note,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistKind {
    /// `f → 0`.
    Vanishing,
    /// `f` bounded and bounded away from zero.
    BoundedNonvanishing,
}

/// Radial function `f(r)` for `r ≥ start`, with a declared kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistFunction {
    pub values: Vec<f64>,
    pub start: usize,
    pub kind: TwistKind,
}

impl TwistFunction {
    pub fn new(values: Vec<f64>, start: usize, kind: TwistKind) -> Self {
        Self { values, start, kind }
    }

    /// `f(r) = 1/r` on `1..=max_r`.
    pub fn reciprocal(max_r: usize) -> Self {
        Self::new((1..=max_r).map(|r| 1.0 / r as f64).collect(), 1, TwistKind::Vanishing)
    }

    /// `f(r) = 1/r + 1` on `1..=max_r`.
    pub fn shifted_reciprocal(max_r: usize) -> Self {
        Self::new(
            (1..=max_r).map(|r| 1.0 / r as f64 + 1.0).collect(),
            1,
            TwistKind::BoundedNonvanishing,
        )
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    pub fn value(&self, r: usize) -> Option<f64> {
        r.checked_sub(self.start).and_then(|i| self.values.get(i).copied())
    }

    /// `f̂(r) = f(r) − f(r+1)`.
    pub fn increment(&self, r: usize) -> Option<f64> {
        Some(self.value(r)? - self.value(r + 1)?)
    }

    /// Strict decrease and positivity from `from` on, and the kind seen
    /// on the available range.
    pub fn validate(&self, from: usize) -> Result<TwistKind, CriteriaError> {
        let from = from.max(self.start);
        let first = self.value(from).ok_or(CriteriaError::TwistTooShort {
            start: self.start,
            end: self.end(),
            needed: from,
        })?;
        for r in from..self.end() {
            let v = self.value(r).unwrap();
            let next = self.value(r + 1);
            if !(v > 0.0) || next.is_some_and(|n| !(n < v)) {
                return Err(CriteriaError::TwistNotDecreasing { r });
            }
        }
        let last = self.values[self.values.len() - 1];
        Ok(if last / first < VANISHING_RATIO {
            TwistKind::Vanishing
        } else {
            TwistKind::BoundedNonvanishing
        })
    }
}

/// Both sides of the twisted inequality at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistTerms {
    pub vertex: Vertex,
    pub radius: usize,
    /// `κ₊(x) f̂(r) − κ₋(x) f̂(r−1)`.
    pub lhs: f64,
    /// `λ f(r)`.
    pub rhs: f64,
    /// `κ₊(x) − κ₋(x) f̂(r−1)/f̂(r)`.
    pub divided_lhs: f64,
    /// `λ f(r)/f̂(r)`.
    pub divided_rhs: f64,
    /// Largest term, used for the comparison slack.
    pub scale: f64,
}

/// Twisted terms at all non-frontier vertices on spheres `r > cutoff`.
pub fn twist_terms(
    g: &WeightedGraph,
    root: Vertex,
    f: &TwistFunction,
    lambda: f64,
    cutoff: usize,
) -> Result<Vec<TwistTerms>, CriteriaError> {
    let kf = curvature_field(g, root)?;
    let mv = metric_view(g, root)?;
    let mut out = Vec::new();
    for x in (0..g.len()).filter(|&x| kf.reliable[x]) {
        let r = mv.distance[x];
        if r <= cutoff {
            continue;
        }
        let too_short = CriteriaError::TwistTooShort {
            start: f.start,
            end: f.end(),
            needed: r + 1,
        };
        let (fr, inc, prev) = match (f.value(r), f.increment(r), f.increment(r - 1)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(too_short),
        };
        let (kp, km) = (kf.outer[x], kf.inner[x]);
        let lhs = kp * inc - km * prev;
        let rhs = lambda * fr;
        out.push(TwistTerms {
            vertex: x,
            radius: r,
            lhs,
            rhs,
            divided_lhs: kp - km * (prev / inc),
            divided_rhs: lambda * fr / inc,
            scale: (kp * inc).abs().max((km * prev).abs()).max(rhs.abs()),
        });
    }
    Ok(out)
}

fn twisted_check(
    g: &WeightedGraph,
    root: Vertex,
    f: &TwistFunction,
    lambda: f64,
    cutoff: usize,
    required: TwistKind,
) -> Result<(Option<Witness>, String), CriteriaError> {
    if f.kind != required {
        return Err(CriteriaError::TwistKindMismatch {
            required,
            declared: f.kind,
        });
    }
    let observed = f.validate(cutoff)?;
    if observed != f.kind {
        return Err(CriteriaError::WrongTwistKind {
            declared: f.kind,
            observed,
        });
    }
    let terms = twist_terms(g, root, f, lambda, cutoff)?;
    let failing = terms.iter().find(|t| match required {
        TwistKind::Vanishing => !within(t.rhs, t.lhs, t.scale),
        TwistKind::BoundedNonvanishing => !within(t.lhs, t.rhs, t.scale),
    });
    let max_r = terms.iter().map(|t| t.radius).max().unwrap_or(cutoff);
    let note = format!(
        "{} vertices on radii {}..={max_r} checked, lambda = {lambda}",
        terms.len(),
        cutoff + 1
    );
    let w = failing.map(|t| Witness::Vertex {
        vertex: t.vertex,
        radius: t.radius,
        base_point: root,
        lhs: t.lhs,
        rhs: t.rhs,
    });
    Ok((w, note))
}

/// `κ₊ f̂(r) − κ₋ f̂(r−1) ≥ λ f(r)` on `r > R` with `f` vanishing gives Feller.
pub fn twisted_feller_check(
    g: &WeightedGraph,
    root: Vertex,
    f: &TwistFunction,
    lambda: f64,
    cutoff: usize,
) -> Result<CriterionReport, CriteriaError> {
    let id = CriterionId::TwistedFeller;
    let (w, note) = twisted_check(g, root, f, lambda, cutoff, TwistKind::Vanishing)?;
    Ok(match w {
        None => CriterionReport::yes(id, Conclusion::Feller, Grade::TruncationScale, note),
        Some(w) => CriterionReport::not_applicable(id, Applies::No, Some(w), note),
    })
}

/// `κ₊ f̂(r) − κ₋ f̂(r−1) ≤ λ f(r)` on `r > R` with `f` bounded and
/// nonvanishing gives non-Feller on stochastically complete graphs.
pub fn twisted_nonfeller_check(
    g: &WeightedGraph,
    root: Vertex,
    f: &TwistFunction,
    lambda: f64,
    cutoff: usize,
    sc: Option<&ScEvidence>,
) -> Result<CriterionReport, CriteriaError> {
    let id = CriterionId::TwistedNonFeller;
    let sc = sc.ok_or(CriteriaError::StochasticCompletenessNotEstablished)?;
    let (w, note) = twisted_check(g, root, f, lambda, cutoff, TwistKind::BoundedNonvanishing)?;
    let note = format!("{note}; stochastic completeness from {:?} ({:?})", sc.source, sc.grade);
    Ok(match w {
        None => CriterionReport::yes(
            id,
            Conclusion::NotFeller,
            Grade::TruncationScale.weakest(sc.grade),
            note,
        ),
        Some(w) => CriterionReport::not_applicable(id, Applies::No, Some(w), note),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureOrder {
    /// Both stronger and weaker: the curvatures agree.
    Equal,
    Stronger,
    Weaker,
    Incomparable,
}

/// Compares curvatures against a model on `r > R` and transfers the model's
/// classification where the comparison allows.
pub fn compare_to_model(
    g: &WeightedGraph,
    root: Vertex,
    mg: &ModelGraph,
    classification: Option<&FellerClassification>,
    cutoff: usize,
) -> Result<(CriterionReport, CurvatureOrder), CriteriaError> {
    let id = CriterionId::CompareToModel;
    let class = classification.ok_or(CriteriaError::ModelNotClassified)?;
    let kf = curvature_field(g, root)?;
    let mv = metric_view(g, root)?;
    let close = |a: f64, b: f64| (a - b).abs() <= REL_SLACK * a.abs().max(b.abs());
    let (mut stronger, mut weaker) = (true, true);
    let (mut not_stronger, mut not_weaker) = (None, None);
    let mut checked = 0;
    for x in (0..g.len()).filter(|&x| kf.reliable[x]) {
        let r = mv.distance[x];
        if r <= cutoff || r >= mg.length() {
            continue;
        }
        checked += 1;
        let (kp, km) = (kf.outer[x], kf.inner[x]);
        let (mp, mm) = (mg.outer_curv[r], mg.inner_curv[r]);
        let ge = |a: f64, b: f64| a >= b || close(a, b);
        let s = ge(kp, mp) && ge(mm, km);
        let w = ge(mp, kp) && ge(km, mm);
        let witness = |lhs, rhs| Witness::Vertex {
            vertex: x,
            radius: r,
            base_point: root,
            lhs,
            rhs,
        };
        if !s && stronger {
            stronger = false;
            not_stronger = Some(if ge(kp, mp) { witness(km, mm) } else { witness(kp, mp) });
        }
        if !w && weaker {
            weaker = false;
            not_weaker = Some(if ge(mp, kp) { witness(km, mm) } else { witness(kp, mp) });
        }
    }
    let order = match (stronger, weaker) {
        (true, true) => CurvatureOrder::Equal,
        (true, false) => CurvatureOrder::Stronger,
        (false, true) => CurvatureOrder::Weaker,
        (false, false) => CurvatureOrder::Incomparable,
    };
    let note = format!(
        "{checked} vertices on radii {}..{} compared; model is {:?} ({:?})",
        cutoff + 1,
        mg.length(),
        class.outcome,
        class.grade
    );
    let grade = Grade::TruncationScale.weakest(class.grade);
    let report = match class.outcome {
        Conclusion::Feller if stronger => CriterionReport::yes(id, Conclusion::Feller, grade, note),
        Conclusion::NotFeller if weaker => CriterionReport::yes(id, Conclusion::NotFeller, grade, note),
        Conclusion::Feller => CriterionReport::not_applicable(id, Applies::No, not_stronger, note),
        Conclusion::NotFeller => CriterionReport::not_applicable(id, Applies::No, not_weaker, note),
        Conclusion::None => CriterionReport::not_applicable(id, Applies::InconclusiveAtTruncation, None, note),
    };
    Ok((report, order))
}
