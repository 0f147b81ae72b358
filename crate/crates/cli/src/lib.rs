//! Front end for `feller_core`: file loading, example generation and the
//! subcommands behind the `feller-lab` binary.

pub mod commands;
pub mod examples;
pub mod report;

use feller_core::criteria::CriteriaError;
use feller_core::graph::{parse_graph, write_graph, GraphError, WeightedGraph};
use feller_core::harmonic::HarmonicError;
use feller_core::model::{parse_model, write_model, ModelError, ModelGraph};
use feller_core::spectral::SpectralError;
use thiserror::Error;

pub use commands::{cmd_classify_model, cmd_criteria, cmd_generate, cmd_heat, cmd_solve_h};
pub use report::{Outcome, Report, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Contents of an input file.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Graph(WeightedGraph),
    Model(ModelGraph),
}

/// Model files are recognised by their first record being `R` or `TAIL`.
pub fn parse_input(text: &str) -> Result<Input, CliError> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next());
    match first {
        Some("R") | Some("TAIL") => Ok(Input::Model(parse_model(text)?)),
        _ => Ok(Input::Graph(parse_graph(text)?)),
    }
}

pub fn read_input(path: &str) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|error| CliError::Io {
        path: path.into(),
        error,
    })?;
    parse_input(&text)
}

pub fn render_input(input: &Input) -> String {
    match input {
        Input::Graph(g) => write_graph(g),
        Input::Model(m) => write_model(m),
    }
}

/// Comma-separated list, e.g. `8,16,32`.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::BadParams(format!("bad {what} {t:?}"))))
        .collect()
}
