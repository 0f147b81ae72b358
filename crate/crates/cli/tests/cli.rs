//! Subcommand behaviour through the built binary: reports, exit codes and errors.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const GOLDEN: f64 = 0.381_966_011_250_105_1;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stderr))
    }
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_feller-lab"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Writes a generated example to a per-test temp file.
fn generate(tag: &str, args: &[&str]) -> PathBuf {
    let r = run(&[&["generate"], args].concat());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let dir = std::env::temp_dir().join(format!("feller-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(tag);
    std::fs::write(&path, r.stdout).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_h_on_the_unit_line_reaches_the_closed_form() {
    let g = generate("unit-line.graph", &["unit-line", "--size", "40"]);
    let r = run(&["solve-h", "--input", p(&g), "--radii", "8,16,32"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["outcome"], "conclusion");
    let h1 = v["results"]["decay_profile"][1][1].as_f64().unwrap();
    assert!((h1 - GOLDEN).abs() < 1e-6, "h(1) = {h1}");
    assert_eq!(v["results"]["verdict"]["evidence"], "feller-evidence");
    assert_eq!(v["results"]["verdict"]["grade"], "truncation-scale");
}

#[test]
fn positive_lambda_is_rejected() {
    let g = generate("unit-line-lambda.graph", &["unit-line", "--size", "16"]);
    let r = run(&["solve-h", "--input", p(&g), "--radii", "4,8", "--lambda", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("lambda"), "{}", r.stderr);
}

#[test]
fn undecided_decay_exits_with_two() {
    let g = generate("incomplete.graph", &["incomplete-line", "--size", "64"]);
    let r = run(&["solve-h", "--input", p(&g), "--radii", "31,62"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["results"]["verdict"]["evidence"], "inconclusive");
}

#[test]
fn model_example_solve_h_plateaus() {
    let g = generate("model-example-512.graph", &["model-example", "--size", "512"]);
    let r = run(&["solve-h", "--input", p(&g), "--radii", "255,510"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["results"]["verdict"]["evidence"], "non-feller-evidence");
}

#[test]
fn uniform_bound_on_the_unit_line_is_feller() {
    let g = generate("unit-line-bound.graph", &["unit-line", "--size", "40"]);
    let r = run(&[
        "criteria",
        "--input",
        p(&g),
        "--criterion",
        "uniform-bound",
        "--bound",
        "2",
    ]);
    assert_eq!(r.code, 0);
    let rep = &r.json()["results"]["reports"][0];
    assert_eq!(rep["applies"], "yes");
    assert_eq!(rep["conclusion"], "feller");
    assert_eq!(rep["grade"], "truncation-scale");
}

#[test]
fn glued_lines_follow_the_twisted_criteria() {
    let g = generate("glued-growth.graph", &["glued-line", "--size", "128", "--c", "2"]);
    let r = run(&[
        "criteria",
        "--input",
        p(&g),
        "--criterion",
        "twisted-feller",
        "--lambda",
        "-3",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["results"]["reports"][0]["conclusion"], "feller");

    let g = generate(
        "glued-decay.graph",
        &["glued-line", "--size", "128", "--c", "1", "--rule", "decay"],
    );
    let args = [
        "criteria",
        "--input",
        p(&g),
        "--criterion",
        "twisted-nonfeller",
        "--lambda",
        "-0.5",
    ];
    // Without stochastic completeness evidence the non-Feller direction is refused.
    assert_eq!(run(&args).code, 1);
    let r = run(&[&args[..], &["--sc", "asserted:gluing"]].concat());
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["results"]["reports"][0]["conclusion"], "not-feller");
}

#[test]
fn unknown_criterion_is_an_error() {
    let g = generate("unit-line-unknown.graph", &["unit-line", "--size", "16"]);
    let r = run(&["criteria", "--input", p(&g), "--criterion", "no-such-criterion"]);
    assert_eq!(r.code, 1);
}

#[test]
fn classify_model_reports_bundled_verdicts() {
    for (name, feller, transient) in [
        ("model-example", "not-feller", false),
        ("ternary-anti-example", "not-feller", false),
        ("binary-tree-unit", "feller", true),
    ] {
        let m = generate(&format!("{name}.model"), &[name, "--size", "63", "--model"]);
        let r = run(&["classify-model", "--input", p(&m)]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let v = r.json();
        assert_eq!(v["results"]["feller"]["outcome"], feller, "{name}");
        assert_eq!(v["results"]["transience"]["holds"], transient, "{name}");
        assert_eq!(v["results"]["stochastic_completeness"]["holds"], true, "{name}");
    }
}

#[test]
fn heat_mass_grows_along_the_exhaustion() {
    let g = generate("unit-line-heat.graph", &["unit-line", "--size", "40"]);
    let r = run(&["heat", "--input", p(&g), "--radii", "8,16,32", "--times", "0.5,1,2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    for probe in v["results"]["mass_probe"].as_array().unwrap() {
        let masses: Vec<f64> = probe["masses"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m.as_f64().unwrap())
            .collect();
        assert!(masses.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{masses:?}");
        assert!(masses.iter().all(|&m| m <= 1.0 + 1e-12));
    }
}

#[test]
fn heat_at_time_zero_echoes_the_initial_data() {
    let g = generate("unit-line-echo.graph", &["unit-line", "--size", "16"]);
    let r = run(&[
        "heat",
        "--input",
        p(&g),
        "--radii",
        "4,8",
        "--times",
        "0",
        "--u0",
        "3=2",
    ]);
    // No positive time, so the probes have nothing to say.
    assert_eq!(r.code, 2, "{}", r.stderr);
    for entry in r.json()["results"]["evolution"]["values"].as_array().unwrap() {
        let expected = if entry["vertex"] == "3" { 2.0 } else { 0.0 };
        assert_eq!(entry["u"][0].as_f64().unwrap(), expected);
    }
}

#[test]
fn heat_flags_the_model_example_profile() {
    let g = generate("model-example-heat.graph", &["model-example", "--size", "64"]);
    let r = run(&["heat", "--input", p(&g), "--radii", "16,32,62", "--times", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["results"]["feller_probe"][0]["evidence"], "contradicts");
    let evolved = v["results"]["evolution"]["mass"][0].as_f64().unwrap();
    assert!(evolved < 1.0);
}

#[test]
fn generate_rejects_unknown_examples_and_small_sizes() {
    assert_eq!(run(&["generate", "no-such-example"]).code, 1);
    assert_eq!(run(&["generate", "unit-line", "--size", "4"]).code, 1);
}

#[test]
fn generated_files_carry_the_frontier() {
    let r = run(&["generate", "model-example", "--size", "64"]);
    let vertices = r.stdout.lines().filter(|l| l.starts_with("M ")).count();
    assert_eq!(vertices, 65);
    assert_eq!(
        r.stdout.lines().filter(|l| l.starts_with("F ")).collect::<Vec<_>>(),
        ["F 64"]
    );
}

#[test]
fn csv_output_is_available_for_profiles() {
    let g = generate("unit-line-csv.graph", &["unit-line", "--size", "40"]);
    let r = run(&["solve-h", "--input", p(&g), "--radii", "8,16,32", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.lines().count() > 10);
    assert!(r.stdout.lines().next().unwrap().contains(','));
}
