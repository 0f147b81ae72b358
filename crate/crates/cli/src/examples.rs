//! Bundled example graphs and their radial models.

use std::fmt;
use std::str::FromStr;

use feller_core::graph::{glue_pendant, GraphBuilder, WeightedGraph};
use feller_core::model::{model_from_radial, ModelGraph, Tail, TailAnnotations};

use crate::CliError;

/// Smallest line length, and smallest vertex count of a tree.
pub const MIN_SIZE: usize = 8;
const MIN_DEPTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    /// Unit-weight line with `m(r) = (r+1)^{-(2+ε)}`.
    ModelExample,
    /// Ternary tree with `b = 2(r+1)/3^{r+1}` between generations `r` and `r+1`.
    TernaryAntiExample,
    UnitLine,
    BinaryTreeUnit,
    /// The model example line with a pendant `x_r` at every `r > 1`.
    GluedLine,
    /// Line with `b(r, r+1) = (r+1)^2` and `m(r) = (r+1)^{-2}`.
    IncompleteLine,
}

pub const ALL_EXAMPLES: [ExampleId; 6] = [
    ExampleId::ModelExample,
    ExampleId::TernaryAntiExample,
    ExampleId::UnitLine,
    ExampleId::BinaryTreeUnit,
    ExampleId::GluedLine,
    ExampleId::IncompleteLine,
];

impl ExampleId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::ModelExample => "model-example",
            ExampleId::TernaryAntiExample => "ternary-anti-example",
            ExampleId::UnitLine => "unit-line",
            ExampleId::BinaryTreeUnit => "binary-tree-unit",
            ExampleId::GluedLine => "glued-line",
            ExampleId::IncompleteLine => "incomplete-line",
        }
    }

    pub fn is_model(self) -> bool {
        self != ExampleId::GluedLine
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_EXAMPLES
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::UnknownExample(s.to_string()))
    }
}

/// Measure rule for the pendants of the glued line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureRule {
    /// `m(x_r) = (r(r−1))^{-1}`.
    Growth,
    /// `m(x_r) = (r(r−1)(r+2))^{-1}`.
    Decay,
}

impl FromStr for MeasureRule {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "growth" => Ok(MeasureRule::Growth),
            "decay" => Ok(MeasureRule::Decay),
            _ => Err(CliError::BadParams(format!("unknown measure rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExampleParams {
    /// Line length or tree depth; the frontier sits at this radius.
    pub size: usize,
    pub eps: f64,
    pub c: f64,
    pub rule: MeasureRule,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            size: 64,
            eps: 1.0,
            c: 2.0,
            rule: MeasureRule::Growth,
        }
    }
}

impl ExampleParams {
    fn validate(&self, id: ExampleId, graph: bool) -> Result<(), CliError> {
        let tree_arity = match id {
            ExampleId::TernaryAntiExample => Some(3usize),
            ExampleId::BinaryTreeUnit => Some(2),
            _ => None,
        };
        let too_small = match tree_arity {
            Some(a) => self.size < MIN_DEPTH || a.saturating_pow(self.size as u32 + 1) / (a - 1) < MIN_SIZE,
            None => self.size < MIN_SIZE,
        };
        if too_small {
            return Err(CliError::BadParams(format!("size {} is too small for {id}", self.size)));
        }
        if matches!(
            id,
            ExampleId::ModelExample | ExampleId::TernaryAntiExample | ExampleId::GluedLine
        ) && !(self.eps > 0.0 && self.eps.is_finite())
        {
            return Err(CliError::BadParams(format!("eps must be positive, got {}", self.eps)));
        }
        if id == ExampleId::GluedLine && !(self.c > 0.0 && self.c.is_finite()) {
            return Err(CliError::BadParams(format!("c must be positive, got {}", self.c)));
        }
        let depth_cap = match id {
            ExampleId::TernaryAntiExample => 12,
            ExampleId::BinaryTreeUnit => 20,
            _ => usize::MAX,
        };
        if graph && self.size > depth_cap {
            return Err(CliError::BadParams(format!("depth {} exceeds {depth_cap}", self.size)));
        }
        Ok(())
    }
}

fn line(n: usize, b: impl Fn(usize) -> f64, m: impl Fn(usize) -> f64) -> Result<WeightedGraph, CliError> {
    let mut gb = GraphBuilder::new();
    let names: Vec<String> = (0..=n).map(|r| r.to_string()).collect();
    for (r, name) in names.iter().enumerate() {
        gb.measure(name, m(r));
    }
    for r in 0..n {
        gb.edge(&names[r], &names[r + 1], b(r));
    }
    gb.frontier(&names[n]);
    Ok(gb.build()?)
}

/// Full tree of the given arity and depth, vertices numbered breadth first.
fn tree(
    arity: usize,
    depth: usize,
    b: impl Fn(usize) -> f64,
    m: impl Fn(usize) -> f64,
) -> Result<WeightedGraph, CliError> {
    let mut gb = GraphBuilder::new();
    let mut generation = Vec::new();
    let mut count = 1;
    for r in 0..=depth {
        generation.extend(std::iter::repeat_n(r, count));
        count *= arity;
    }
    let names: Vec<String> = (0..generation.len()).map(|i| i.to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        gb.measure(name, m(generation[i]));
    }
    for (i, name) in names.iter().enumerate() {
        if generation[i] == depth {
            continue;
        }
        for c in 1..=arity {
            gb.edge(name, &names[arity * i + c], b(generation[i]));
        }
    }
    for (i, name) in names.iter().enumerate() {
        if generation[i] == depth {
            gb.frontier(name);
        }
    }
    Ok(gb.build()?)
}

fn pendant_measure(rule: MeasureRule, r: usize) -> f64 {
    let r = r as f64;
    match rule {
        MeasureRule::Growth => 1.0 / (r * (r - 1.0)),
        MeasureRule::Decay => 1.0 / (r * (r - 1.0) * (r + 2.0)),
    }
}

pub fn example_graph(id: ExampleId, p: &ExampleParams) -> Result<WeightedGraph, CliError> {
    p.validate(id, true)?;
    let n = p.size;
    match id {
        ExampleId::ModelExample => line(n, |_| 1.0, |r| ((r + 1) as f64).powf(-(2.0 + p.eps))),
        ExampleId::TernaryAntiExample => tree(
            3,
            n,
            |r| 2.0 * (r + 1) as f64 / 3f64.powi(r as i32 + 1),
            |r| 1.0 / (3f64.powi(r as i32) * ((r + 1) as f64).powf(1.0 + p.eps)),
        ),
        ExampleId::UnitLine => line(n, |_| 1.0, |_| 1.0),
        ExampleId::BinaryTreeUnit => tree(2, n, |_| 1.0, |_| 1.0),
        ExampleId::IncompleteLine => line(n, |r| ((r + 1) as f64).powi(2), |r| ((r + 1) as f64).powi(-2)),
        ExampleId::GluedLine => {
            let mut g = line(n, |_| 1.0, |r| ((r + 1) as f64).powf(-(2.0 + p.eps)))?;
            for r in 2..=n {
                let w = p.c / (r - 1) as f64;
                g = glue_pendant(&g, r, &format!("x{r}"), w, pendant_measure(p.rule, r))?;
            }
            Ok(g)
        }
    }
}

/// Radial data with tail annotations, over radii `0..=size`.
pub fn example_model(id: ExampleId, p: &ExampleParams) -> Result<ModelGraph, CliError> {
    p.validate(id, false)?;
    let len = p.size + 1;
    let radial = |kp: &dyn Fn(f64) -> f64, m: &dyn Fn(f64) -> f64, tails| {
        let outer = (0..len).map(|r| kp(r as f64)).collect();
        let measure = (0..len).map(|r| m(r as f64)).collect();
        model_from_radial(outer, measure, tails).map_err(CliError::from)
    };
    let e = p.eps;
    match id {
        ExampleId::ModelExample => radial(
            &|r| (r + 1.0).powf(2.0 + e),
            &|r| (r + 1.0).powf(-(2.0 + e)),
            TailAnnotations {
                inv_boundary: Some(Tail::power(0.0)),
                tail_measure_over_boundary: Some(Tail::power(1.0 + e)),
                ball_measure_over_boundary: Some(Tail::power(0.0)),
                sphere_measure: Some(Tail::power(2.0 + e)),
            },
        ),
        ExampleId::TernaryAntiExample => radial(
            &|r| 2.0 * (r + 1.0).powf(2.0 + e),
            &|r| (r + 1.0).powf(-(1.0 + e)),
            TailAnnotations {
                inv_boundary: Some(Tail::power(1.0)),
                tail_measure_over_boundary: Some(Tail::power(1.0 + e)),
                ball_measure_over_boundary: Some(Tail::power(1.0)),
                sphere_measure: Some(Tail::power(1.0 + e)),
            },
        ),
        ExampleId::UnitLine => radial(
            &|_| 1.0,
            &|_| 1.0,
            TailAnnotations {
                inv_boundary: Some(Tail::power(0.0)),
                tail_measure_over_boundary: None,
                ball_measure_over_boundary: Some(Tail::power(-1.0)),
                sphere_measure: Some(Tail::power(0.0)),
            },
        ),
        ExampleId::BinaryTreeUnit => radial(
            &|_| 2.0,
            &|r| 2f64.powf(r),
            TailAnnotations {
                inv_boundary: Some(Tail::exp(std::f64::consts::LN_2)),
                tail_measure_over_boundary: None,
                ball_measure_over_boundary: Some(Tail::power(0.0)),
                sphere_measure: Some(Tail::exp(-std::f64::consts::LN_2)),
            },
        ),
        ExampleId::IncompleteLine => radial(
            &|r| (r + 1.0).powi(4),
            &|r| (r + 1.0).powi(-2),
            TailAnnotations {
                inv_boundary: Some(Tail::power(2.0)),
                tail_measure_over_boundary: Some(Tail::power(3.0)),
                ball_measure_over_boundary: Some(Tail::power(2.0)),
                sphere_measure: Some(Tail::power(2.0)),
            },
        ),
        ExampleId::GluedLine => Err(CliError::BadParams("glued-line is not a model graph".into())),
    }
}
