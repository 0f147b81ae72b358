//! Text format for radial models.
//!
//! ```text
//! # comment
//! R <r> <kappa_plus> <m_sphere>
//! TAIL <series> <power|exp> <exponent>
//! ```
//!
//! `<series>` is one of `inv_boundary`, `tail_measure_over_boundary`,
//! `ball_measure_over_boundary` or `sphere_measure`.

use std::fmt::Write as _;

use super::{model_from_radial, ModelError, ModelGraph, Tail, TailAnnotations, TailKind};

fn parse_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<f64, ModelError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} is not finite")));
    }
    Ok(v)
}

pub fn parse_model(text: &str) -> Result<ModelGraph, ModelError> {
    let mut rows: Vec<Option<(f64, f64)>> = Vec::new();
    let mut tails = TailAnnotations::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "R" => {
                let r_tok = toks.next().ok_or_else(|| parse_err(line, "missing radius"))?;
                let r: usize = r_tok
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad radius {r_tok:?}")))?;
                let kp = number(toks.next(), line, "kappa_plus")?;
                let m = number(toks.next(), line, "m_sphere")?;
                if rows.len() <= r {
                    rows.resize(r + 1, None);
                }
                if rows[r].is_some_and(|prev| prev != (kp, m)) {
                    return Err(parse_err(line, format!("radius {r} given twice")));
                }
                rows[r] = Some((kp, m));
            }
            "TAIL" => {
                let id = toks.next().ok_or_else(|| parse_err(line, "missing series id"))?;
                let kind = match toks.next() {
                    Some("power") => TailKind::Power,
                    Some("exp") => TailKind::Exp,
                    other => return Err(parse_err(line, format!("bad tail kind {other:?}"))),
                };
                let tail = Tail {
                    kind,
                    exponent: number(toks.next(), line, "exponent")?,
                };
                let slot = match id {
                    "inv_boundary" => &mut tails.inv_boundary,
                    "tail_measure_over_boundary" => &mut tails.tail_measure_over_boundary,
                    "ball_measure_over_boundary" => &mut tails.ball_measure_over_boundary,
                    "sphere_measure" => &mut tails.sphere_measure,
                    _ => return Err(parse_err(line, format!("unknown series {id:?}"))),
                };
                *slot = Some(tail);
            }
            _ => return Err(parse_err(line, format!("unknown record {tag:?}"))),
        }
        if let Some(extra) = toks.next() {
            return Err(parse_err(line, format!("trailing token {extra:?}")));
        }
    }
    let mut outer = Vec::with_capacity(rows.len());
    let mut measure = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let (kp, m) = row.ok_or_else(|| parse_err(0, format!("radius {r} missing")))?;
        outer.push(kp);
        measure.push(m);
    }
    model_from_radial(outer, measure, tails)
}

pub fn write_model(mg: &ModelGraph) -> String {
    let mut out = String::new();
    for r in 0..mg.length() {
        let _ = writeln!(out, "R {r} {:?} {:?}", mg.outer_curv[r], mg.sphere_measure[r]);
    }
    let t = &mg.tails;
    for (id, tail) in [
        ("inv_boundary", t.inv_boundary),
        ("tail_measure_over_boundary", t.tail_measure_over_boundary),
        ("ball_measure_over_boundary", t.ball_measure_over_boundary),
        ("sphere_measure", t.sphere_measure),
    ] {
        if let Some(tail) = tail {
            let kind = match tail.kind {
                TailKind::Power => "power",
                TailKind::Exp => "exp",
            };
            let _ = writeln!(out, "TAIL {id} {kind} {:?}", tail.exponent);
        }
    }
    out
}
