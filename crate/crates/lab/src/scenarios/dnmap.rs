//! One DN matrix for the configured metric and patches.

use conflab::dn::{assemble_dn_matrix, make_source_basis};

use super::{build_metric, write_dn};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

pub fn run_dnmap(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let g = cfg.grid.grid(cfg.grid.finest_level)?;
    let sources = cfg.patch(&g, &cfg.dn.sources)?;
    let receivers = cfg.patch(&g, &cfg.dn.receivers)?;
    let metric = build_metric(cfg, &g, cfg.dn.metric)?;
    let basis = make_source_basis(&g, &sources, &cfg.dn.counts)?;
    let m = assemble_dn_matrix(&metric, &sources, &receivers, &basis, &cfg.dn.dn_config())?;
    write_dn(&mut run, "dn", &m, &g)?;

    run.headline("rows", m.rows() as f64);
    run.headline("cols", m.cols() as f64);
    run.headline("frobenius", m.frobenius());
    run.check(Check::holds(
        "entries_finite",
        m.values.iter().all(|v| v.is_finite()),
        m.max_abs(),
    ));
    run.check(Check::holds("nonzero_response", m.frobenius() > 0.0, m.frobenius()));

    let entries: Vec<Vec<f64>> = (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .map(|(r, c)| vec![c as f64, r as f64, m.get(r, c)])
        .collect();
    run.write_table("dn_entries.csv", &["source", "receiver", "value"], &entries)?;
    run.plot(
        PlotSpec::new(
            "dn_entries",
            &format!("DN matrix, {} metric", cfg.dn.metric.name()),
            "dn_entries.csv",
            PlotStyle::Heatmap,
            (1, "source"),
            "receiver row",
        )
        .series(2, "Λ"),
    );
    run.finish()
}
