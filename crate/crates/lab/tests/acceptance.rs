//! One PASS/FAIL line per acceptance criterion, each from a default scenario
//! run through the library entry point.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use conflab_lab::{execute, ReportSummary, RunOptions, ScenarioKind};

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conflab-acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(kind: ScenarioKind, name: &str, negative_control: bool) -> (ReportSummary, Duration) {
    run_in(kind, &out_dir(name), negative_control)
}

fn run_in(kind: ScenarioKind, dir: &Path, negative_control: bool) -> (ReportSummary, Duration) {
    let opts = RunOptions {
        out: Some(dir.to_path_buf()),
        negative_control,
        ..RunOptions::default()
    };
    let cfg = opts.resolve(kind).expect("default configuration resolves");
    let start = Instant::now();
    let (summary, _) = execute(&cfg).unwrap_or_else(|e| panic!("{kind} failed to run: {e}"));
    (summary, start.elapsed())
}

/// Passes when every named check passed and the run met its time budget.
fn criterion(
    name: &'static str,
    summary: &ReportSummary,
    checks: &[&str],
    elapsed: Duration,
    budget: Duration,
) -> Outcome {
    let mut passed = elapsed <= budget;
    let mut parts = Vec::new();
    for &c in checks {
        match summary.check(c) {
            Some(check) => {
                passed &= check.passed;
                parts.push(format!("{c}={:.4e}{}", check.value, if check.passed { "" } else { " (failed)" }));
            }
            None => {
                passed = false;
                parts.push(format!("{c} missing"));
            }
        }
    }
    parts.push(format!("{:.1}s of {}s", elapsed.as_secs_f64(), budget.as_secs()));
    Outcome {
        name,
        passed,
        detail: parts.join(", "),
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let mut identical = true;
    let mut compared = 0;
    let start = Instant::now();
    for kind in [ScenarioKind::Solve, ScenarioKind::Dnmap, ScenarioKind::Rigidity] {
        let (da, db) = (out_dir(&format!("{kind}-a")), out_dir(&format!("{kind}-b")));
        run_in(kind, &da, false);
        run_in(kind, &db, false);
        let (fa, fb) = (csv_files(&da), csv_files(&db));
        identical &= !fa.is_empty() && fa == fb;
        compared += fa.len();
    }
    Outcome {
        name: "determinism",
        passed: identical,
        detail: format!("{compared} CSV files bit-identical across two runs, {:.1}s", start.elapsed().as_secs_f64()),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut outcomes = Vec::new();

    // the four identity criteria share one run: 10 + 10 + 5 + 5 seconds
    let (ids, t_ids) = run(ScenarioKind::Identities, "identities", false);
    outcomes.push(criterion(
        "hidden_conformal_invariance",
        &ids,
        &["invariance_order", "invariance_finest"],
        t_ids,
        secs(30),
    ));
    outcomes.push(criterion(
        "conformal_operator_and_curvature",
        &ids,
        &["conformal_wave_operator_order", "scalar_curvature_change_order", "scalar_flatness_order"],
        t_ids,
        secs(30),
    ));
    outcomes.push(criterion(
        "divergence_form_identity",
        &ids,
        &["divergence_quadratic_constant_coefficients", "divergence_scalar_order", "divergence_system_order"],
        t_ids,
        secs(30),
    ));

    let (conv, t) = run(ScenarioKind::Convergence, "convergence", false);
    outcomes.push(criterion(
        "solver_verification",
        &conv,
        &["order_33_65", "order_65_129", "slope_matches_orders", "discrete_cone_minkowski"],
        t,
        secs(60),
    ));

    let (thm11, t) = run(ScenarioKind::Thm11, "thm11", true);
    outcomes.push(criterion(
        "theorem_1_1",
        &thm11,
        &[
            "clearance_gamma_65",
            "dn_relative_frobenius_65",
            "dn_refinement_gain_65_129",
            "max_c_minus_1",
            "certificate_margin",
            "certificate_non_isometric",
            "control_ratio_65",
        ],
        t,
        secs(600),
    ));
    outcomes.push(criterion(
        "transport_oracle",
        &thm11,
        &["transport_streamed_matches_stored", "transport_order_min"],
        t,
        secs(600),
    ));

    let (thm12, t) = run(ScenarioKind::Thm12, "thm12", false);
    outcomes.push(criterion(
        "theorem_1_2",
        &thm12,
        &[
            "trace_gamma2_65",
            "trace_gamma2_129",
            "dn_relative_frobenius_65",
            "dn_refinement_gain_65_129",
            "lambda_exponent_65",
        ],
        t,
        secs(900),
    ));

    let (rig, t) = run(ScenarioKind::Rigidity, "rigidity", false);
    let rigidity_checks: Vec<&str> = rig
        .checks
        .iter()
        .map(|c| c.name.as_str())
        .filter(|n| n.starts_with("deviation_") || n.starts_with("cancellation_"))
        .collect();
    assert!(rigidity_checks.len() >= 4, "rigidity ran without paths");
    outcomes.push(criterion("rigidity", &rig, &rigidity_checks, t, secs(5)));

    outcomes.push(criterion(
        "appendix_checks",
        &ids,
        &["hyperbolicity_minkowski", "hyperbolicity_suite_factor", "counterexample_schrodinger_order"],
        t_ids,
        secs(30),
    ));

    outcomes.push(determinism());

    for o in &outcomes {
        println!("{} {:<34} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
