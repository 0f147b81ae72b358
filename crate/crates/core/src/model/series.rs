//! Convergence verdicts for positive series known only up to a truncation.

use serde::Serialize;

use super::ModelError;
use crate::evidence::Grade;

pub const MIN_TERMS: usize = 16;
const CONVERGENT_SLOPE: f64 = -1.2;
const DIVERGENT_SLOPE: f64 = -0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesId {
    InvBoundary,
    TailMeasureOverBoundary,
    BallMeasureOverBoundary,
}

impl SeriesId {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesId::InvBoundary => "inv_boundary",
            SeriesId::TailMeasureOverBoundary => "tail_measure_over_boundary",
            SeriesId::BallMeasureOverBoundary => "ball_measure_over_boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// Terms behave like `c · r^{-exponent}`.
    Power,
    /// Terms behave like `c · e^{-exponent · r}`.
    Exp,
}

/// User-asserted asymptotics of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tail {
    pub kind: TailKind,
    pub exponent: f64,
}

impl Tail {
    pub fn power(exponent: f64) -> Self {
        Self {
            kind: TailKind::Power,
            exponent,
        }
    }

    pub fn exp(rate: f64) -> Self {
        Self {
            kind: TailKind::Exp,
            exponent: rate,
        }
    }

    pub fn summable(&self) -> bool {
        match self.kind {
            TailKind::Power => self.exponent > 1.0,
            TailKind::Exp => self.exponent > 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TailAnnotations {
    pub inv_boundary: Option<Tail>,
    pub tail_measure_over_boundary: Option<Tail>,
    pub ball_measure_over_boundary: Option<Tail>,
    /// Asymptotics of `m(S_r)`; used to close `m(B_r^c)` beyond the truncation.
    pub sphere_measure: Option<Tail>,
}

impl TailAnnotations {
    pub fn series(&self, id: SeriesId) -> Option<Tail> {
        match id {
            SeriesId::InvBoundary => self.inv_boundary,
            SeriesId::TailMeasureOverBoundary => self.tail_measure_over_boundary,
            SeriesId::BallMeasureOverBoundary => self.ball_measure_over_boundary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesStatus {
    ConvergentCertified,
    DivergentCertified,
    ConvergentHeuristic,
    DivergentHeuristic,
    Inconclusive,
}

impl SeriesStatus {
    pub fn convergent(self) -> Option<bool> {
        match self {
            SeriesStatus::ConvergentCertified | SeriesStatus::ConvergentHeuristic => Some(true),
            SeriesStatus::DivergentCertified | SeriesStatus::DivergentHeuristic => Some(false),
            SeriesStatus::Inconclusive => None,
        }
    }

    pub fn grade(self) -> Grade {
        match self {
            SeriesStatus::ConvergentCertified | SeriesStatus::DivergentCertified => Grade::Certified,
            _ => Grade::Heuristic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum SeriesBasis {
    TailAnnotation {
        tail: Tail,
    },
    NondecreasingTerms,
    LogLogSlope {
        slope: f64,
    },
    /// Every term is infinite, e.g. `m(B_r^c)/∂B_r` on an infinite-measure graph.
    InfiniteTerms {
        grade: Grade,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub series_id: Option<SeriesId>,
    pub status: SeriesStatus,
    pub partial_sums: Vec<f64>,
    pub basis: SeriesBasis,
}

impl SeriesVerdict {
    pub fn with_id(mut self, id: SeriesId) -> Self {
        self.series_id = Some(id);
        self
    }
}

/// Least-squares slope of `ln t_i` against `ln(i + 1)` over the last half.
pub fn loglog_slope(terms: &[f64]) -> f64 {
    let start = terms.len() / 2;
    let pts: Vec<(f64, f64)> = terms[start..]
        .iter()
        .enumerate()
        .map(|(k, &t)| (((start + k + 1) as f64).ln(), t.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn series_verdict(terms: &[f64], tail: Option<Tail>) -> Result<SeriesVerdict, ModelError> {
    if terms.len() < MIN_TERMS {
        return Err(ModelError::TooFewTerms(terms.len()));
    }
    if let Some(r) = terms.iter().position(|&t| !(t > 0.0)) {
        return Err(ModelError::NonPositiveEntry {
            field: "series term",
            r,
        });
    }
    let mut acc = 0.0;
    let partial_sums = terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect();
    let (status, basis) = if let Some(t) = tail {
        let s = if t.summable() {
            SeriesStatus::ConvergentCertified
        } else {
            SeriesStatus::DivergentCertified
        };
        (s, SeriesBasis::TailAnnotation { tail: t })
    } else if terms.windows(2).all(|w| w[1] >= w[0]) {
        (SeriesStatus::DivergentCertified, SeriesBasis::NondecreasingTerms)
    } else {
        let slope = loglog_slope(terms);
        let s = if slope < CONVERGENT_SLOPE {
            SeriesStatus::ConvergentHeuristic
        } else if slope > DIVERGENT_SLOPE {
            SeriesStatus::DivergentHeuristic
        } else {
            SeriesStatus::Inconclusive
        };
        (s, SeriesBasis::LogLogSlope { slope })
    };
    Ok(SeriesVerdict {
        series_id: None,
        status,
        partial_sums,
        basis,
    })
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation after a direct head.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const HEAD: usize = 12;
    // B_2j / (2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let mut sum: f64 = (0..HEAD).map(|k| (a + k as f64).powf(-s)).sum();
    let x = a + HEAD as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // term_j = B_2j/(2j)! · s(s+1)…(s+2j−2) · x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= x * x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annotated_p_series() {
        let terms: Vec<f64> = (1..=40).map(|r| (r as f64).powi(-2)).collect();
        let v = series_verdict(&terms, Some(Tail::power(2.0))).unwrap();
        assert_eq!(v.status, SeriesStatus::ConvergentCertified);
        let v = series_verdict(&terms, None).unwrap();
        assert_eq!(v.status, SeriesStatus::ConvergentHeuristic);
    }

    #[test]
    fn harmonic_boundary_case_is_inconclusive() {
        let terms: Vec<f64> = (0..64).map(|r| 1.0 / (2.0 * (r as f64 + 1.0))).collect();
        let v = series_verdict(&terms, None).unwrap();
        assert_eq!(v.status, SeriesStatus::Inconclusive);
        match v.basis {
            SeriesBasis::LogLogSlope { slope } => assert!((slope + 1.0).abs() < 1e-12),
            _ => panic!("expected slope basis"),
        }
        let v = series_verdict(&terms, Some(Tail::power(1.0))).unwrap();
        assert_eq!(v.status, SeriesStatus::DivergentCertified);
    }

    #[test]
    fn constant_terms_diverge() {
        let v = series_verdict(&[1.0; 20], None).unwrap();
        assert_eq!(v.status, SeriesStatus::DivergentCertified);
        assert_eq!(v.basis, SeriesBasis::NondecreasingTerms);
        assert_eq!(v.partial_sums[19], 20.0);
    }

    #[test]
    fn too_few_terms() {
        assert_eq!(series_verdict(&[1.0; 15], None), Err(ModelError::TooFewTerms(15)));
    }

    #[test]
    fn zeta_values() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-14);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_3).abs() < 1e-14);
        // ζ(3, 514) = ζ(3) − Σ_{k=1}^{513} k^{-3}
        let direct: f64 = 1.202_056_903_159_594_3 - (1..=513).map(|k| (k as f64).powi(-3)).sum::<f64>();
        assert!((hurwitz_zeta(3.0, 514.0) - direct).abs() < 1e-15);
    }
}
