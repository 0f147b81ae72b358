use feller_core::Grade;
use serde::Serialize;
use serde_json::{Map, Value};

pub const DEFAULT_TOL_SOLVE: f64 = 1e-10;
pub const DEFAULT_TOL_CONV: f64 = 1e-8;
pub const DEFAULT_TOL_DECAY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by all commands. Command-specific parameters go in `extra`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub root: Option<String>,
    pub lambda: f64,
    pub omega: Option<String>,
    pub radii: Vec<usize>,
    pub tol_solve: f64,
    pub tol_conv: f64,
    pub tol_decay: f64,
    pub format: Format,
    pub extra: Map<String, Value>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            root: None,
            lambda: -1.0,
            omega: None,
            radii: Vec::new(),
            tol_solve: DEFAULT_TOL_SOLVE,
            tol_conv: DEFAULT_TOL_CONV,
            tol_decay: DEFAULT_TOL_DECAY,
            format: Format::Json,
            extra: Map::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.into(), value.into());
        self
    }
}

/// One conclusion and how far it can be trusted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedItem {
    pub item: String,
    pub value: String,
    pub grade: Grade,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub truncation_radius: Option<usize>,
    pub frontier_vertices: usize,
    pub final_region_touches_frontier: Option<bool>,
    pub conclusions: Vec<GradedItem>,
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn grade(&mut self, item: &str, value: impl ToString, grade: Grade) {
        self.conclusions.push(GradedItem {
            item: item.into(),
            value: value.to_string(),
            grade,
        });
    }
}

/// Whether a command reached a conclusion. Maps to exit codes 0 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Conclusion,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Conclusion => 0,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub outcome: Outcome,
    pub results: Value,
    pub provenance: Provenance,
    /// Plottable profile, emitted instead of JSON with `--format csv`.
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
