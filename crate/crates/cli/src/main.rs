use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use feller_lab::commands::{CriteriaParams, CriterionSel, ScSpec};
use feller_lab::examples::{ExampleId, ExampleParams, MeasureRule};
use feller_lab::report::Format;
use feller_lab::{
    cmd_classify_model, cmd_criteria, cmd_generate, cmd_heat, cmd_solve_h, parse_list, read_input, Input, Report,
    RunConfig,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "feller-lab",
    version,
    about = "Feller property diagnostics for weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Graph or model file.
    #[arg(long)]
    input: String,
    /// Root vertex name; defaults to the first vertex.
    #[arg(long)]
    root: Option<String>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Exhaustion radii, e.g. `8,16,32`.
    #[arg(long)]
    radii: Option<String>,
    /// `ball:<k>` or a comma-separated list of vertex names.
    #[arg(long)]
    omega: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol_solve: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_conv: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol_decay: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Series classification of a model file, or of a graph that is a model at the root.
    ClassifyModel(Common),
    /// Minimal λ-harmonic function outside Ω and its decay verdict.
    SolveH {
        #[command(flatten)]
        common: Common,
        /// Allowed gap between radial truncations (model files only).
        #[arg(long, default_value_t = 1e-6)]
        tol_truncation: f64,
    },
    /// Dirichlet heat evolution with mass and decay probes.
    Heat {
        #[command(flatten)]
        common: Common,
        /// `delta:<name>` or `<name>=<value>,...`; defaults to a point mass at the root.
        #[arg(long)]
        u0: Option<String>,
        #[arg(long, default_value = "1")]
        times: String,
    },
    /// Curvature criteria on a truncated graph.
    Criteria {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: uniform-bound, bounded-operator, measure-divergence,
        /// twisted-feller, twisted-nonfeller, compare-model.
        #[arg(long)]
        criterion: String,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 2.0)]
        bound: f64,
        #[arg(long, default_value_t = 2)]
        cutoff: usize,
        /// Base points are sampled from the ball of half this radius.
        #[arg(long)]
        base_radius: Option<usize>,
        #[arg(long)]
        require_all_basepoints: bool,
        /// Model file for compare-model.
        #[arg(long)]
        model: Option<String>,
        /// `asserted[:note]`, `mass-probe[:t]` or `model-series`.
        #[arg(long)]
        sc: Option<String>,
    },
    /// Writes a bundled example as a graph or model file.
    Generate {
        example: String,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value = "growth")]
        rule: String,
        /// Emit radial model data instead of the graph.
        #[arg(long)]
        model: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

fn config(name: &str, c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(name);
    cfg.inputs = vec![c.input.clone()];
    cfg.root = c.root.clone();
    cfg.lambda = c.lambda;
    cfg.omega = c.omega.clone();
    if let Some(r) = &c.radii {
        cfg.radii = parse_list(r, "radius")?;
    }
    cfg.tol_solve = c.tol_solve;
    cfg.tol_conv = c.tol_conv;
    cfg.tol_decay = c.tol_decay;
    cfg.format = match c.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    Ok(cfg)
}

fn emit(text: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: Report, out: Option<&str>) -> Result<i32> {
    let text = match &report.csv {
        Some(csv) => csv.clone(),
        None => report.to_json(),
    };
    emit(&text, out)?;
    Ok(report.outcome.exit_code())
}

fn load(c: &Common) -> Result<Input> {
    Ok(read_input(&c.input)?)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::ClassifyModel(c) => {
            let cfg = config("classify-model", &c)?;
            finish(cmd_classify_model(&cfg, &load(&c)?)?, c.out.as_deref())
        }
        Command::SolveH {
            common: c,
            tol_truncation,
        } => {
            let cfg = config("solve-h", &c)?.with_extra("tol_truncation", tol_truncation);
            finish(cmd_solve_h(&cfg, &load(&c)?)?, c.out.as_deref())
        }
        Command::Heat { common: c, u0, times } => {
            let times: Vec<f64> = parse_list(&times, "time")?;
            let cfg = config("heat", &c)?
                .with_extra("u0", u0.clone())
                .with_extra("times", json!(times));
            finish(cmd_heat(&cfg, &load(&c)?, u0.as_deref(), &times)?, c.out.as_deref())
        }
        Command::Criteria {
            common: c,
            criterion,
            k,
            bound,
            cutoff,
            base_radius,
            require_all_basepoints,
            model,
            sc,
        } => {
            let selected = criterion
                .split(',')
                .map(|s| s.trim().parse::<CriterionSel>())
                .collect::<Result<Vec<_>, _>>()?;
            let mg = match &model {
                Some(path) => match read_input(path)? {
                    Input::Model(m) => Some(m),
                    Input::Graph(_) => anyhow::bail!("{path} is not a model file"),
                },
                None => None,
            };
            let params = CriteriaParams {
                selected,
                k,
                bound,
                cutoff,
                base_radius,
                require_all_basepoints,
                model: mg,
                sc: sc.as_deref().map(str::parse::<ScSpec>).transpose()?,
            };
            let mut cfg = config("criteria", &c)?
                .with_extra("criterion", criterion)
                .with_extra("k", k)
                .with_extra("bound", bound)
                .with_extra("cutoff", cutoff)
                .with_extra("require_all_basepoints", require_all_basepoints)
                .with_extra("sc", sc);
            if let Some(r) = base_radius {
                cfg = cfg.with_extra("base_radius", r);
            }
            if let Some(path) = model {
                cfg.inputs.push(path);
            }
            finish(cmd_criteria(&cfg, &load(&c)?, &params)?, c.out.as_deref())
        }
        Command::Generate {
            example,
            size,
            eps,
            c,
            rule,
            model,
            out,
        } => {
            let id: ExampleId = example.parse()?;
            let params = ExampleParams {
                size,
                eps,
                c,
                rule: rule.parse::<MeasureRule>()?,
            };
            emit(&cmd_generate(id, &params, model)?, out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let threads = std::env::var("FELLER_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
