use serde::Serialize;

/// How much a conclusion can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    /// Follows from the stated hypotheses and user-supplied tail annotations.
    Certified,
    /// Extrapolated from the finite range by a fitted rule.
    Heuristic,
    /// Observed on the truncation only, e.g. a universal quantifier that was sampled.
    TruncationScale,
}

impl Grade {
    /// The weaker of two grades.
    pub fn weakest(self, other: Grade) -> Grade {
        self.max(other)
    }
}

/// Numerical evidence label for probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    Supports,
    Contradicts,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    Feller,
    NotFeller,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScSource {
    /// Series classification of a model graph.
    ModelSeries,
    /// Heat mass along an exhaustion.
    MassProbe,
    /// Supplied by the caller without computation.
    Asserted,
}

/// Stochastic completeness evidence handed to the non-Feller tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScEvidence {
    pub source: ScSource,
    pub grade: Grade,
    pub note: String,
}

impl ScEvidence {
    pub fn new(source: ScSource, grade: Grade, note: impl Into<String>) -> Self {
        Self {
            source,
            grade,
            note: note.into(),
        }
    }
}
