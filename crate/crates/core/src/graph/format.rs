//! Plain-text graph files.
//!
//! ```text
//! # comment
//! M <vertex> <measure>
//! E <u> <v> <weight>
//! F <vertex>
//! ```

use std::fmt::Write;

use super::{GraphBuilder, GraphError, WeightedGraph};

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<f64, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    let v: f64 = tok.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("bad {what} {tok:?}"),
    })?;
    if !v.is_finite() {
        return Err(GraphError::Parse {
            line,
            message: format!("{what} must be finite"),
        });
    }
    Ok(v)
}

fn name(tok: Option<&str>, line: usize) -> Result<&str, GraphError> {
    tok.ok_or_else(|| GraphError::Parse {
        line,
        message: "missing vertex".into(),
    })
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    let mut builder = GraphBuilder::new();
    let mut frontier = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "E" => {
                let u = name(toks.next(), line)?;
                let v = name(toks.next(), line)?;
                let b = number(toks.next(), line, "weight")?;
                builder.edge(u, v, b);
            }
            "M" => {
                let v = name(toks.next(), line)?;
                let m = number(toks.next(), line, "measure")?;
                builder.measure(v, m);
            }
            "F" => frontier.push((name(toks.next(), line)?.to_string(), line)),
            other => {
                return Err(GraphError::Parse {
                    line,
                    message: format!("unknown record {other:?}"),
                })
            }
        }
        if toks.next().is_some() {
            return Err(GraphError::Parse {
                line,
                message: "trailing tokens".into(),
            });
        }
    }
    for (v, line) in frontier {
        if !builder.index.contains_key(&v) {
            return Err(GraphError::Parse {
                line,
                message: format!("frontier vertex {v} has no edges"),
            });
        }
        builder.frontier(&v);
    }
    builder.build()
}

/// Measures in index order, then edges, then frontier flags. Parsing the
/// output reproduces the same index assignment.
pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for x in 0..g.len() {
        writeln!(out, "M {} {:?}", g.name(x), g.measure(x)).unwrap();
    }
    for (x, y, b) in g.edges() {
        writeln!(out, "E {} {} {:?}", g.name(x), g.name(y), b).unwrap();
    }
    for x in g.frontier() {
        writeln!(out, "F {}", g.name(x)).unwrap();
    }
    out
}
