use std::fmt::Write as _;

use feller_core::criteria::{
    bounded_operator_check, compare_to_model, measure_divergence_check, sampled_base_points, twisted_feller_check,
    twisted_nonfeller_check, uniform_curvature_bound, CriterionReport, TwistFunction, DEFAULT_CUTOFF,
};
use feller_core::evidence::{Conclusion, Evidence, ScEvidence, ScSource};
use feller_core::graph::{ball_exhaustion, metric_view, region, MetricView, Vertex, WeightedGraph};
use feller_core::harmonic::{
    feller_verdict_from_h, minimal_h, ExteriorProblem, HEvidence, HVerdict, HarmonicError, DEFAULT_BUFFER,
};
use feller_core::model::{
    classify_feller, classify_stochastic_completeness, classify_transience, detect_model, radial_limit_h_from,
    radial_verdict, ModelError, ModelGraph, SeriesVerdict,
};
use feller_core::spectral::{exhaustion_operators, feller_probe, heat_evolve, mass_from_operators, mass_probe};
use feller_core::Grade;
use serde_json::{json, Value};

use crate::examples::{example_graph, example_model, ExampleId, ExampleParams};
use crate::report::{Format, Outcome, Provenance, Report, RunConfig};
use crate::{render_input, CliError, Input};

/// Gap allowed between the two radial truncations on the inner half.
pub const DEFAULT_TOL_TRUNCATION: f64 = 1e-6;

fn root_of(g: &WeightedGraph, cfg: &RunConfig) -> Result<Vertex, CliError> {
    match &cfg.root {
        Some(name) => Ok(g.vertex(name)?),
        None => Ok(0),
    }
}

fn check_lambda(lambda: f64) -> Result<(), CliError> {
    if lambda < 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(CliError::BadParams(format!("lambda must be negative, got {lambda}")))
    }
}

/// Largest ball radius that stays clear of the frontier.
fn safe_radius(g: &WeightedGraph, mv: &MetricView) -> usize {
    match mv.frontier_radius(g) {
        Some(f) => f.saturating_sub(2),
        None => mv.radius(),
    }
}

fn radii_or_default(cfg: &RunConfig, g: &WeightedGraph, mv: &MetricView) -> Vec<usize> {
    if !cfg.radii.is_empty() {
        return cfg.radii.clone();
    }
    let r = safe_radius(g, mv).max(1);
    if r >= 2 {
        vec![r / 2, r]
    } else {
        vec![r]
    }
}

/// `ball:k`, a comma-separated list of vertex names, or the root.
fn omega_vertices(g: &WeightedGraph, mv: &MetricView, spec: Option<&str>) -> Result<Vec<Vertex>, CliError> {
    match spec {
        None => Ok(vec![mv.root]),
        Some(s) => match s.strip_prefix("ball:") {
            Some(k) => {
                let k: usize = k.parse().map_err(|_| CliError::BadParams(format!("bad omega {s:?}")))?;
                Ok(mv.ball(k))
            }
            None => s.split(',').map(|n| Ok(g.vertex(n.trim())?)).collect(),
        },
    }
}

fn omega_radius(spec: Option<&str>) -> Result<usize, CliError> {
    match spec {
        None => Ok(0),
        Some(s) => s
            .strip_prefix("ball:")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| CliError::BadParams(format!("model omega must be ball:<k>, got {s:?}"))),
    }
}

fn graph_provenance(g: &WeightedGraph, mv: &MetricView) -> Provenance {
    Provenance {
        truncation_radius: mv.frontier_radius(g),
        frontier_vertices: g.frontier().count(),
        ..Provenance::default()
    }
}

fn series_csv(series: &[(&str, &SeriesVerdict)]) -> String {
    let mut out = String::from("r");
    for (name, _) in series {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    let len = series.iter().map(|s| s.1.partial_sums.len()).max().unwrap_or(0);
    for r in 0..len {
        let _ = write!(out, "{r}");
        for (_, s) in series {
            match s.partial_sums.get(r) {
                Some(v) => {
                    let _ = write!(out, ",{v:?}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Feller, stochastic completeness and transience of a model, read from a
/// model file or detected on a graph at the root.
pub fn cmd_classify_model(cfg: &RunConfig, input: &Input) -> Result<Report, CliError> {
    let mut prov = Provenance::default();
    let mg: ModelGraph = match input {
        Input::Model(m) => {
            prov.truncation_radius = Some(m.length() - 1);
            m.clone()
        }
        Input::Graph(g) => {
            let root = root_of(g, cfg)?;
            let mv = metric_view(g, root)?;
            prov = graph_provenance(g, &mv);
            prov.notes.push(format!(
                "radial data detected at root {}; no tail annotations",
                g.name(root)
            ));
            detect_model(g, root)?
        }
    };
    let mut outcome = Outcome::Conclusion;
    let inconclusive = |e: ModelError| -> Result<Value, CliError> {
        match e {
            ModelError::InconclusiveSeries(id) => Ok(json!({ "inconclusive": id.as_str() })),
            other => Err(other.into()),
        }
    };
    let feller = match classify_feller(&mg) {
        Ok(c) => {
            prov.grade("feller", format!("{:?}", c.outcome), c.grade);
            serde_json::to_value(&c)?
        }
        Err(e) => {
            outcome = Outcome::Inconclusive;
            inconclusive(e)?
        }
    };
    let sc = match classify_stochastic_completeness(&mg) {
        Ok(c) => {
            prov.grade("stochastically-complete", c.holds, c.grade);
            serde_json::to_value(&c)?
        }
        Err(e) => inconclusive(e)?,
    };
    let transience = match classify_transience(&mg) {
        Ok(c) => {
            prov.grade("transient", c.holds, c.grade);
            serde_json::to_value(&c)?
        }
        Err(e) => inconclusive(e)?,
    };
    let csv = if cfg.format == Format::Csv {
        let tr = classify_transience(&mg).ok();
        let sc = classify_stochastic_completeness(&mg).ok();
        let mut cols = Vec::new();
        if let Some(t) = &tr {
            cols.push(("inv_boundary", &t.series));
        }
        if let Some(s) = &sc {
            cols.push(("ball_measure_over_boundary", &s.series));
        }
        Some(series_csv(&cols))
    } else {
        None
    };
    let results = json!({
        "model": {
            "length": mg.length(),
            "compatibility_error": mg.compatibility_error(),
            "boundary_area": mg.boundary_area,
            "tails": mg.tails,
        },
        "feller": feller,
        "stochastic_completeness": sc,
        "transience": transience,
    });
    Ok(Report {
        command: cfg.command.clone(),
        config: cfg.clone(),
        outcome,
        results,
        provenance: prov,
        csv,
    })
}

fn verdict_outcome(v: Option<&HVerdict>) -> Outcome {
    match v.map(|v| v.evidence) {
        Some(HEvidence::FellerEvidence) | Some(HEvidence::NonFellerEvidence) => Outcome::Conclusion,
        _ => Outcome::Inconclusive,
    }
}

fn verdict_or_none(r: Result<HVerdict, HarmonicError>, prov: &mut Provenance) -> Result<Option<HVerdict>, CliError> {
    match r {
        Ok(v) => {
            prov.grade("decay-verdict", format!("{:?}", v.evidence), v.grade);
            Ok(Some(v))
        }
        Err(HarmonicError::InsufficientAnnuli { available }) => {
            prov.notes
                .push(format!("only {available} usable annuli for the decay test"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

/// Minimal λ-harmonic `h` along a ball exhaustion, or the radial limit for a model file.
pub fn cmd_solve_h(cfg: &RunConfig, input: &Input) -> Result<Report, CliError> {
    check_lambda(cfg.lambda)?;
    match input {
        Input::Graph(g) => solve_h_graph(cfg, g),
        Input::Model(mg) => solve_h_model(cfg, mg),
    }
}

fn solve_h_graph(cfg: &RunConfig, g: &WeightedGraph) -> Result<Report, CliError> {
    let root = root_of(g, cfg)?;
    let mv = metric_view(g, root)?;
    let mut prov = graph_provenance(g, &mv);
    let radii = radii_or_default(cfg, g, &mv);
    let omega = omega_vertices(g, &mv, cfg.omega.as_deref())?;
    let problem = ExteriorProblem::new(region(g, omega)?, cfg.lambda)?;
    let exh = ball_exhaustion(g, root, &radii, false)?;
    prov.final_region_touches_frontier = Some(exh.final_touches_frontier);
    let sol = minimal_h(g, &problem, &exh, cfg.tol_conv, DEFAULT_BUFFER)?;
    let verdict = verdict_or_none(feller_verdict_from_h(&sol, cfg.tol_decay), &mut prov)?;
    prov.notes.push(format!("exhaustion radii {radii:?}"));
    let csv = (cfg.format == Format::Csv).then(|| {
        let mut out = String::from("radius");
        for r in &radii {
            let _ = write!(out, ",h_{r}");
        }
        out.push('\n');
        let max = *radii.last().unwrap();
        for r in 0..=max {
            let _ = write!(out, "{r}");
            for p in &sol.sphere_profiles {
                match p.get(r) {
                    Some(v) => {
                        let _ = write!(out, ",{v:?}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    });
    let results = json!({
        "region_radii": sol.region_radii,
        "omega_radius": sol.omega_radius,
        "sphere_profiles": sol.sphere_profiles,
        "decay_profile": sol.decay_profile,
        "residual": sol.residual,
        "residual_within_tol": sol.residual <= cfg.tol_solve,
        "converged": sol.converged,
        "sup_gap": sol.sup_gap,
        "verdict": verdict,
    });
    Ok(Report {
        command: cfg.command.clone(),
        config: cfg.clone(),
        outcome: verdict_outcome(verdict.as_ref()),
        results,
        provenance: prov,
        csv,
    })
}

fn solve_h_model(cfg: &RunConfig, mg: &ModelGraph) -> Result<Report, CliError> {
    let k = omega_radius(cfg.omega.as_deref())?;
    let tol = cfg
        .extra
        .get("tol_truncation")
        .and_then(Value::as_f64)
        .unwrap_or(DEFAULT_TOL_TRUNCATION);
    let lim = radial_limit_h_from(mg, cfg.lambda, k, tol)?;
    let mut prov = Provenance {
        truncation_radius: Some(mg.length() - 1),
        ..Provenance::default()
    };
    prov.notes
        .push(format!("radial truncations {} and {}", lim.coarse.n, lim.fine.n));
    let verdict = match radial_verdict(&lim, cfg.tol_decay, DEFAULT_BUFFER) {
        Ok(v) => verdict_or_none(Ok(v), &mut prov)?,
        Err(ModelError::Harmonic(e)) => verdict_or_none(Err(e), &mut prov)?,
        Err(e) => return Err(e.into()),
    };
    let csv = (cfg.format == Format::Csv).then(|| {
        let mut out = String::from("radius,h_coarse,h_fine\n");
        for (r, v) in lim.fine.h.iter().enumerate() {
            let c = lim.coarse.h.get(r).map(|c| format!("{c:?}")).unwrap_or_default();
            let _ = writeln!(out, "{r},{c},{v:?}");
        }
        out
    });
    let results = json!({
        "closure": lim.closure,
        "limit_at_infinity": lim.limit_at_infinity,
        "gap": lim.gap,
        "bracket_holds": lim.bracket_holds,
        "bracket_violation": lim.bracket_violation,
        "flux_ratio": lim.flux_ratio,
        "measure_tail": lim.measure_tail,
        "coarse": lim.coarse,
        "fine": lim.fine,
        "verdict": verdict,
    });
    Ok(Report {
        command: cfg.command.clone(),
        config: cfg.clone(),
        outcome: verdict_outcome(verdict.as_ref()),
        results,
        provenance: prov,
        csv,
    })
}

/// Initial datum; `delta:<name>` or `<name>=<value>,...`. Returns the dense
/// vector and the vertex of a delta, when it is one.
fn parse_u0(g: &WeightedGraph, root: Vertex, spec: Option<&str>) -> Result<(Vec<f64>, Option<Vertex>), CliError> {
    let mut u0 = vec![0.0; g.len()];
    let spec = spec.unwrap_or("");
    if spec.is_empty() {
        u0[root] = 1.0;
        return Ok((u0, Some(root)));
    }
    if let Some(name) = spec.strip_prefix("delta:") {
        let x = g.vertex(name)?;
        u0[x] = 1.0;
        return Ok((u0, Some(x)));
    }
    for part in spec.split(',') {
        let (name, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::BadParams(format!("bad u0 entry {part:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::BadParams(format!("bad u0 value {v:?}")))?;
        u0[g.vertex(name.trim())?] = v;
    }
    Ok((u0, None))
}

/// Heat evolution on the final region with mass and decay probes.
pub fn cmd_heat(cfg: &RunConfig, input: &Input, u0_spec: Option<&str>, times: &[f64]) -> Result<Report, CliError> {
    let Input::Graph(g) = input else {
        return Err(CliError::BadParams("heat needs a graph file".into()));
    };
    let root = root_of(g, cfg)?;
    let mv = metric_view(g, root)?;
    let mut prov = graph_provenance(g, &mv);
    let radii = radii_or_default(cfg, g, &mv);
    let exh = ball_exhaustion(g, root, &radii, false)?;
    prov.final_region_touches_frontier = Some(exh.final_touches_frontier);
    let (u0, delta) = parse_u0(g, root, u0_spec)?;
    let ops = exhaustion_operators(g, &exh)?;
    let ev = heat_evolve(ops.last().unwrap(), &u0, times)?;
    let values: Vec<Value> = ev
        .interior
        .iter()
        .enumerate()
        .map(|(i, &x)| json!({ "vertex": g.name(x), "u": ev.values.iter().map(|v| v[i]).collect::<Vec<_>>() }))
        .collect();
    let r_last = *exh.radii.last().unwrap();
    let annuli: Vec<usize> = (0..=r_last).collect();
    let mut masses = Vec::new();
    let mut probes = Vec::new();
    let mut outcome = Outcome::Inconclusive;
    for &t in times.iter().filter(|&&t| t > 0.0) {
        if let Some(x) = delta {
            let mp = mass_from_operators(&ops, x, t)?;
            prov.grade(
                &format!("stochastic-completeness@t={t}"),
                format!("{:?}", mp.evidence),
                Grade::TruncationScale,
            );
            masses.push(mp);
        }
        let fp = feller_probe(g, &exh, &u0, t, &annuli, cfg.tol_decay, DEFAULT_BUFFER)?;
        prov.grade(
            &format!("feller@t={t}"),
            format!("{:?}", fp.evidence),
            Grade::TruncationScale,
        );
        outcome = if fp.evidence == Evidence::Inconclusive {
            Outcome::Inconclusive
        } else {
            Outcome::Conclusion
        };
        probes.push(fp);
    }
    if delta.is_none() {
        prov.notes.push("mass probe skipped: u0 is not a point mass".into());
    }
    let csv = (cfg.format == Format::Csv).then(|| {
        let mut out = String::from("time,radius,sup,near_cut\n");
        for fp in &probes {
            for a in &fp.profile {
                let _ = writeln!(out, "{:?},{},{:?},{}", fp.time, a.radius, a.sup, a.near_cut);
            }
        }
        out
    });
    let results = json!({
        "evolution": {
            "times": ev.times,
            "mass": ev.mass,
            "l2norm": ev.l2norm,
            "boundary_sup": ev.boundary_sup,
            "contaminated": ev.contaminated,
            "values": values,
        },
        "mass_probe": masses,
        "feller_probe": probes,
    });
    Ok(Report {
        command: cfg.command.clone(),
        config: cfg.clone(),
        outcome,
        results,
        provenance: prov,
        csv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionSel {
    UniformBound,
    BoundedOperator,
    MeasureDivergence,
    TwistedFeller,
    TwistedNonFeller,
    CompareModel,
}

impl std::str::FromStr for CriterionSel {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "uniform-bound" => CriterionSel::UniformBound,
            "bounded-operator" => CriterionSel::BoundedOperator,
            "measure-divergence" => CriterionSel::MeasureDivergence,
            "twisted-feller" => CriterionSel::TwistedFeller,
            "twisted-nonfeller" => CriterionSel::TwistedNonFeller,
            "compare-model" => CriterionSel::CompareModel,
            _ => return Err(CliError::UnknownCriterion(s.into())),
        })
    }
}

/// How stochastic completeness is supplied to the non-Feller test.
#[derive(Debug, Clone, PartialEq)]
pub enum ScSpec {
    Asserted(String),
    /// Heat mass at this time along the default exhaustion.
    MassProbe(f64),
    /// Series classification of the supplied model, or of the radial data
    /// detected at the root.
    ModelSeries,
}

impl std::str::FromStr for ScSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "asserted" => Ok(ScSpec::Asserted(arg.into())),
            "mass-probe" => {
                let t = if arg.is_empty() {
                    1.0
                } else {
                    arg.parse()
                        .map_err(|_| CliError::BadParams(format!("bad time {arg:?}")))?
                };
                Ok(ScSpec::MassProbe(t))
            }
            "model-series" => Ok(ScSpec::ModelSeries),
            _ => Err(CliError::BadParams(format!("unknown sc evidence {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaParams {
    pub selected: Vec<CriterionSel>,
    pub k: f64,
    pub bound: f64,
    pub cutoff: usize,
    pub base_radius: Option<usize>,
    pub require_all_basepoints: bool,
    pub model: Option<ModelGraph>,
    pub sc: Option<ScSpec>,
}

impl Default for CriteriaParams {
    fn default() -> Self {
        Self {
            selected: Vec::new(),
            k: 2.0,
            bound: 2.0,
            cutoff: DEFAULT_CUTOFF,
            base_radius: None,
            require_all_basepoints: false,
            model: None,
            sc: None,
        }
    }
}

fn sc_evidence(
    cfg: &RunConfig,
    g: &WeightedGraph,
    root: Vertex,
    spec: &ScSpec,
    model: Option<&ModelGraph>,
) -> Result<Option<ScEvidence>, CliError> {
    Ok(match spec {
        ScSpec::Asserted(note) => Some(ScEvidence::new(ScSource::Asserted, Grade::Certified, note.clone())),
        ScSpec::MassProbe(t) => {
            let mv = metric_view(g, root)?;
            let exh = ball_exhaustion(g, root, &radii_or_default(cfg, g, &mv), false)?;
            let mp = mass_probe(g, &exh, root, *t)?;
            let last = mp.masses.last().copied().unwrap_or(0.0);
            (mp.evidence == Evidence::Supports).then(|| {
                ScEvidence::new(
                    ScSource::MassProbe,
                    Grade::TruncationScale,
                    format!("mass {last} at t = {t}"),
                )
            })
        }
        ScSpec::ModelSeries => {
            let c = match model {
                Some(mg) => classify_stochastic_completeness(mg)?,
                None => classify_stochastic_completeness(&detect_model(g, root)?)?,
            };
            c.holds
                .then(|| ScEvidence::new(ScSource::ModelSeries, c.grade, "series of m(B_r)/boundary diverges"))
        }
    })
}

pub fn cmd_criteria(cfg: &RunConfig, input: &Input, params: &CriteriaParams) -> Result<Report, CliError> {
    let Input::Graph(g) = input else {
        return Err(CliError::BadParams("criteria need a graph file".into()));
    };
    if cfg.format == Format::Csv {
        return Err(CliError::BadParams("csv output is only available for profiles".into()));
    }
    let root = root_of(g, cfg)?;
    let mv = metric_view(g, root)?;
    let mut prov = graph_provenance(g, &mv);
    let twist_len = mv.radius() + 2;
    let mut reports: Vec<CriterionReport> = Vec::new();
    let mut extras = serde_json::Map::new();
    for sel in &params.selected {
        let rep = match sel {
            CriterionSel::UniformBound => {
                let radius = params.base_radius.unwrap_or(safe_radius(g, &mv));
                let base = sampled_base_points(g, root, radius)?;
                uniform_curvature_bound(g, params.k, &base, params.require_all_basepoints)?
            }
            CriterionSel::BoundedOperator => bounded_operator_check(g, params.bound),
            CriterionSel::MeasureDivergence => measure_divergence_check(g, root)?,
            CriterionSel::TwistedFeller => twisted_feller_check(
                g,
                root,
                &TwistFunction::reciprocal(twist_len),
                cfg.lambda,
                params.cutoff,
            )?,
            CriterionSel::TwistedNonFeller => {
                let sc = match &params.sc {
                    Some(spec) => sc_evidence(cfg, g, root, spec, params.model.as_ref())?,
                    None => None,
                };
                if let Some(sc) = &sc {
                    prov.grade("stochastic-completeness", format!("{:?}", sc.source), sc.grade);
                }
                twisted_nonfeller_check(
                    g,
                    root,
                    &TwistFunction::shifted_reciprocal(twist_len),
                    cfg.lambda,
                    params.cutoff,
                    sc.as_ref(),
                )?
            }
            CriterionSel::CompareModel => {
                let mg = params
                    .model
                    .as_ref()
                    .ok_or_else(|| CliError::BadParams("compare-model needs a model file".into()))?;
                let class = classify_feller(mg).ok();
                let (rep, order) = compare_to_model(g, root, mg, class.as_ref(), params.cutoff)?;
                extras.insert("curvature_order".into(), serde_json::to_value(order)?);
                rep
            }
        };
        if let Some(grade) = rep.grade {
            prov.grade(
                &format!("{:?}", rep.criterion_id),
                format!("{:?}", rep.conclusion),
                grade,
            );
        }
        reports.push(rep);
    }
    let outcome = if reports.iter().any(|r| r.conclusion != Conclusion::None) {
        Outcome::Conclusion
    } else {
        Outcome::Inconclusive
    };
    let mut results = json!({ "reports": reports });
    results.as_object_mut().unwrap().extend(extras);
    Ok(Report {
        command: cfg.command.clone(),
        config: cfg.clone(),
        outcome,
        results,
        provenance: prov,
        csv: None,
    })
}

/// File text for a bundled example.
pub fn cmd_generate(id: ExampleId, params: &ExampleParams, as_model: bool) -> Result<String, CliError> {
    let input = if as_model {
        Input::Model(example_model(id, params)?)
    } else {
        Input::Graph(example_graph(id, params)?)
    };
    let mut header = format!("# {id} size={}", params.size);
    match id {
        ExampleId::ModelExample | ExampleId::TernaryAntiExample => {
            let _ = write!(header, " eps={:?}", params.eps);
        }
        ExampleId::GluedLine => {
            let _ = write!(header, " eps={:?} c={:?} rule={:?}", params.eps, params.c, params.rule);
        }
        _ => {}
    }
    Ok(format!("{header}\n{}", render_input(&input)))
}
