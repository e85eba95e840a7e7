//! Single forward solve from one basis source, with traces, a binary
//! snapshot and the exact finite-propagation check.

use std::fs::File;

use conflab::dn::make_source_basis;
use conflab::solver::snapshot::{read_snapshot, write_snapshot};
use conflab::solver::{discrete_cone_violation, solve, SolverConfig};

use super::build_metric;
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

const CONE: f64 = 1e-12;

pub fn run_solve(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let g = cfg.grid.grid(cfg.grid.finest_level)?;
    let sources = cfg.patch(&g, &cfg.dn.sources)?;
    let receivers = cfg.patch(&g, &cfg.dn.receivers)?;
    let basis = make_source_basis(&g, &sources, &cfg.dn.counts)?;
    let src = basis.get(cfg.solve.source).ok_or_else(|| {
        CliError::Config(format!("solve.source = {} but the basis has {} sources", cfg.solve.source, basis.len()))
    })?;
    let metric = build_metric(cfg, &g, cfg.solve.metric)?;
    let memory_cap_bytes = cfg.dn.memory_cap_mb << 20;
    let full = solve(
        &metric,
        src,
        &SolverConfig {
            memory_cap_bytes,
            ..SolverConfig::default()
        },
    )?;
    let nodes = receivers.nodes(&g);
    let traces = solve(
        &metric,
        src,
        &SolverConfig {
            memory_cap_bytes,
            ..SolverConfig::traces(nodes.clone())
        },
    )?;
    let mut csv = Vec::new();
    traces.write_traces_csv(&mut csv)?;
    run.write("traces.csv", &csv)?;

    let mut mismatch = 0.0f64;
    for k in 0..g.levels() {
        for &node in &nodes {
            let (a, b) = (full.value(k, node), traces.value(k, node));
            mismatch = mismatch.max(match (a, b) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => f64::INFINITY,
            });
        }
    }
    run.check(Check::at_most("traces_match_full_solve", mismatch, 0.0));
    run.check(Check::at_most("discrete_cone", discrete_cone_violation(&full, src)?, CONE));
    run.headline("max_abs", full.max_abs());

    let field = full.into_full().expect("default storage is full");
    if cfg.solve.snapshot {
        let mut bytes = Vec::new();
        write_snapshot(&field, &mut bytes)?;
        run.write("field.bin", &bytes)?;
        let back = read_snapshot(File::open(run.path("field.bin"))?)?;
        run.check(Check::holds(
            "snapshot_round_trip",
            back.values == field.values() && back.levels as usize == g.levels(),
            back.values.len() as f64,
        ));
    }

    run.plot(
        PlotSpec::new(
            "traces",
            &format!("Boundary traces on {}, {} metric", receivers.id, cfg.solve.metric.name()),
            "traces.csv",
            PlotStyle::Heatmap,
            (1, "t"),
            "node",
        )
        .series(2, "u"),
    );
    run.finish()
}
