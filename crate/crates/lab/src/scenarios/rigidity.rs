//! Jet ODE along interior paths: the identity orbit is an equilibrium, and
//! the Christoffel pullback law holds under a non-affine map.

use conflab::rigidity::{christoffel_pullback_check, equilibrium_cancellation, integrate_jet_ode, JetState};

use super::{build_metric, ladder_orders, min_or_nan, sci_list};
use crate::config::{MetricChoice, ScenarioConfig};
use crate::error::Result;
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

const DEVIATION: f64 = 1e-6;
const CANCELLATION: f64 = 1e-10;
const PULLBACK_ORDER: (f64, f64) = (1.9, 2.1);

pub fn run_rigidity(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let r = &cfg.rigidity;
    let g = cfg.grid.grid(0)?;
    let metrics = [
        ("minkowski", build_metric(cfg, &g, MetricChoice::Minkowski)?),
        ("scaled", build_metric(cfg, &g, MetricChoice::Scaled)?),
    ];
    let mut rows = Vec::new();
    for (i, path) in r.paths.iter().enumerate() {
        path.check(&g)?;
        for (j, (name, metric)) in metrics.iter().enumerate() {
            let c = equilibrium_cancellation(path, metric, r.cancellation_samples)?;
            let traj = integrate_jet_ode(&JetState::identity(path.start()), path, metric, r.steps)?;
            let mut csv = Vec::new();
            traj.write_csv(path, &mut csv)?;
            run.write(&format!("trajectory_{name}_{i}.csv"), &csv)?;
            let cancel = c.christoffel.max(c.schouten).max(c.nonlinear);
            run.check(Check::at_most(&format!("cancellation_{name}_{i}"), cancel, CANCELLATION));
            run.check(Check::at_most(&format!("deviation_{name}_{i}"), traj.deviation, DEVIATION));
            rows.push(vec![i as f64, j as f64, traj.deviation, c.christoffel, c.schouten, c.nonlinear, c.term_scale]);
        }
    }
    run.write_table(
        "paths.csv",
        &["path", "metric", "deviation", "christoffel", "schouten", "nonlinear", "term_scale"],
        &rows,
    )?;

    let scaled = &metrics[1].1;
    let mut pull_rows = Vec::new();
    let mut discrepancies = Vec::new();
    for &step in &r.pullback_steps {
        let rep = christoffel_pullback_check(&r.pullback, scaled, &r.pullback_points, step)?;
        pull_rows.push(vec![step, rep.max_discrepancy, rep.max_symbol]);
        discrepancies.push(rep.max_discrepancy);
    }
    let orders = ladder_orders(&discrepancies);
    run.headline("pullback_finest_discrepancy", *discrepancies.last().unwrap_or(&f64::NAN));
    run.check(
        Check::within("pullback_order", min_or_nan(&orders), PULLBACK_ORDER.0, PULLBACK_ORDER.1)
            .with_detail(format!("discrepancies {}", sci_list(&discrepancies))),
    );
    run.write_table("pullback.csv", &["step", "max_discrepancy", "max_symbol"], &pull_rows)?;

    let mut plot = PlotSpec::new(
        "trajectory_deviation",
        "Distance of the jet trajectory from the identity orbit",
        "trajectory_scaled_0.csv",
        PlotStyle::Lines,
        (1, "s"),
        "‖(X, Y, Z) − (I, 0, γ)‖_∞",
    );
    let m = g.m();
    plot = plot.series(1 + m * m + 2 * m + 1, "scaled metric, path 0");
    run.plot(plot);
    run.plot(
        PlotSpec::new(
            "pullback_convergence",
            "Christoffel pullback: finite differences against the transformation law",
            "pullback.csv",
            PlotStyle::LogLog,
            (1, "difference step"),
            "max discrepancy",
        )
        .series(2, "sine map"),
    );
    run.finish()
}
