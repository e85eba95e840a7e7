use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use conflab_lab::plots::emit_plots;
use conflab_lab::report::read_summary;
use conflab_lab::{execute, CliError, RunOptions, ScenarioConfig, ScenarioKind};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conflab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Small thm11 case: 33 nodes, one DN level, a 2×1 basis.
const SMALL_THM11: &str = "\
[grid]
nodes = 33
finest_level = 0
[dn]
counts = [2, 1]
";

fn small_thm11(dir: &Path, extra: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_toml(ScenarioKind::Thm11, &format!("{SMALL_THM11}{extra}")).unwrap();
    cfg.output.dir = dir.to_path_buf();
    cfg
}

fn conflab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_conflab")).args(args).output().unwrap()
}

#[test]
fn small_thm11_writes_plot_scripts() {
    let dir = scratch("thm11");
    let cfg = small_thm11(&dir, "");
    let (summary, scripts) = execute(&cfg).unwrap();
    // the 33-node rung of the transport ladder is pre-asymptotic; the default
    // scenario starts from 65
    let failed: Vec<_> = summary.failed().filter(|c| c.name != "transport_order_min").collect();
    assert!(failed.is_empty(), "{failed:?}");
    let names: Vec<String> = scripts
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["dn_difference.gp", "transport_convergence.gp", "residual_slice.gp"]);
    for (plot, path) in summary.plots.iter().zip(&scripts) {
        let text = fs::read_to_string(path).unwrap();
        assert!(text.contains(&format!("'{}'", plot.csv)));
        assert!(dir.join(&plot.csv).is_file());
    }
    for name in &summary.outputs {
        assert!(dir.join(name).is_file(), "{name}");
    }
    let back = read_summary(&dir.join("summary.json")).unwrap();
    assert_eq!(back.checks.len(), summary.checks.len());
    assert_eq!(back.provenance, summary.provenance);
}

#[test]
fn zero_amplitude_factor_gives_identical_maps_and_fails_the_size_checks() {
    let dir = scratch("zero");
    let cfg = small_thm11(&dir, "[factor]\namplitude = 0.0\n[thm11]\ntransport_levels = 3\n");
    let (summary, _) = execute(&cfg).unwrap();
    assert!(!summary.passed);
    let dn = summary.check("dn_relative_frobenius_33").unwrap();
    assert!(dn.passed && dn.value == 0.0);
    assert!(!summary.check("max_c_minus_1").unwrap().passed);
    assert!(!summary.check("certificate_non_isometric").unwrap().passed);
}

#[test]
fn crossing_slab_is_a_precondition_failure() {
    let dir = scratch("crossing");
    let toml = dir.join("crossing.toml");
    fs::write(&toml, format!("{SMALL_THM11}[factor]\ntheta = [1.0, 0.0]\nt0 = 1.5\n")).unwrap();
    let out = conflab(&["thm11", "--config", toml.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("precondition") && err.contains("gamma"), "{err}");
}

#[test]
fn vanishing_psi_is_rejected() {
    let dir = scratch("psi");
    let mut cfg = ScenarioConfig::from_toml(ScenarioKind::Thm12, "[thm12]\npsi_amplitude = 0.0\n").unwrap();
    cfg.output.dir = dir;
    match execute(&cfg) {
        Err(e @ CliError::Precondition(_)) => assert_eq!(e.exit_code(), 2),
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn plots_need_a_summary_with_plots_and_csvs() {
    let dir = scratch("plots");
    let cfg = small_thm11(&dir, "");
    let (mut summary, _) = execute(&cfg).unwrap();
    fs::remove_file(dir.join("transport.csv")).unwrap();
    assert!(matches!(emit_plots(&summary, &dir), Err(CliError::MissingInput(_))));
    summary.plots.clear();
    assert!(matches!(emit_plots(&summary, &dir), Err(CliError::MissingInput(_))));
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("flags");
    let toml = dir.join("c.toml");
    fs::write(&toml, "[grid]\nnodes = 33\n[scenario]\nseed = 1\n").unwrap();
    let opts = RunOptions {
        config: Some(toml),
        level: Some(2),
        out: Some(dir.join("o")),
        seed: Some(7),
        negative_control: true,
    };
    let cfg = opts.resolve(ScenarioKind::Thm11).unwrap();
    assert_eq!(cfg.grid.nodes, 33);
    assert_eq!(cfg.grid.finest_level, 2);
    assert_eq!(cfg.scenario.seed, 7);
    assert!(cfg.thm11.run_control);
    assert_eq!(cfg.output.dir, dir.join("o"));
    assert!(RunOptions {
        negative_control: true,
        ..RunOptions::default()
    }
    .resolve(ScenarioKind::Solve)
    .is_err());
}

#[test]
fn bad_config_exits_with_code_3() {
    let dir = scratch("bad");
    let toml = dir.join("bad.toml");
    fs::write(&toml, "[grid]\nnodez = 33\n").unwrap();
    let out = conflab(&["solve", "--config", toml.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = conflab(&["solve", "--config", dir.join("absent.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_writes_snapshot_and_traces() {
    let dir = scratch("solve");
    let out = conflab(&["solve", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let snap = conflab::solver::snapshot::read_snapshot(fs::File::open(dir.join("field.bin")).unwrap()).unwrap();
    assert_eq!((snap.n, snap.nodes), (2, 65));
    let traces = fs::read_to_string(dir.join("traces.csv")).unwrap();
    assert!(traces.starts_with("t,node,value\n"));
    assert!(dir.join("traces.gp").is_file());
}
