//! Manufactured-solution refinement study of the Minkowski solver and the
//! exact finite-propagation check of the stencil.

use conflab::dn::make_source_basis;
use conflab::solver::mms::TravellingWave;
use conflab::solver::{convergence_study, discrete_cone_violation, solve, SolverConfig};
use conflab::SpacetimeGrid;

use super::build_metric;
use crate::config::{MetricChoice, ScenarioConfig};
use crate::error::Result;
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

const ORDER: (f64, f64) = (1.9, 2.1);
const SLOPE_MATCH: f64 = 0.05;
const CONE: f64 = 1e-12;

pub fn run_convergence(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let grids = cfg.grid.levels().map(|l| cfg.grid.grid(l)).collect::<Result<Vec<SpacetimeGrid>>>()?;
    let wave = TravellingWave::default_for(cfg.grid.dim);
    let report = convergence_study(&wave, &grids)?;
    let orders: Vec<f64> = report.orders.iter().map(|o| o.unwrap_or(f64::NAN)).collect();
    let slope = report.fitted_slope().unwrap_or(f64::NAN);
    for (w, o) in report.levels.windows(2).zip(&orders) {
        run.check(Check::within(&format!("order_{}_{}", w[0].nodes, w[1].nodes), *o, ORDER.0, ORDER.1));
    }
    let spread = orders.iter().map(|o| (o - slope).abs()).fold(0.0, f64::max);
    run.headline("fitted_slope", slope);
    run.headline("finest_error", report.finest_error());
    run.check(Check::at_most("slope_matches_orders", spread, SLOPE_MATCH).with_detail(format!("slope {slope:.4}")));
    let rows: Vec<Vec<f64>> = report
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let order = if i == 0 { f64::NAN } else { orders[i - 1] };
            vec![l.nodes as f64, l.h, l.error, order]
        })
        .collect();
    run.write_table("convergence.csv", &["nodes", "h", "max_abs_error", "observed_order"], &rows)?;
    run.write_json("convergence.json", &report)?;

    let g = &grids[0];
    let patch = cfg.patch(g, &cfg.dn.sources)?;
    let src = make_source_basis(g, &patch, &cfg.dn.counts)?.remove(0);
    for choice in [MetricChoice::Minkowski, MetricChoice::Base] {
        let metric = build_metric(cfg, g, choice)?;
        let u = solve(&metric, &src, &SolverConfig::default())?;
        let name = format!("discrete_cone_{}", choice.name());
        run.check(Check::at_most(&name, discrete_cone_violation(&u, &src)?, CONE));
    }

    run.plot(
        PlotSpec::new(
            "convergence",
            "Manufactured travelling wave, Minkowski solver",
            "convergence.csv",
            PlotStyle::LogLog,
            (2, "h"),
            "max |u_h − u*|",
        )
        .series(3, "max abs error")
        .annotate(format!("fitted slope {slope:.3}")),
    );
    run.finish()
}
