//! One runner per scenario kind. Each writes its CSV, JSON and plot inputs into
//! the configured output directory and returns the run summary.

mod certify;
mod convergence;
mod dnmap;
mod identities;
mod rigidity;
mod solve;
mod thm11;
mod thm12;

use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::conformal::{scale_metric, support_clearance_check};
use conflab::dn::{BoundaryPatch, DnMatrix};
use conflab::rigidity::certificate::{hessian_obstruction, log_factor_jet};
use conflab::{MetricSpec, SpacetimeGrid};

pub use certify::run_certify;
pub use convergence::run_convergence;
pub use dnmap::run_dnmap;
pub use identities::run_identities;
pub use rigidity::run_rigidity;
pub use solve::run_solve;
pub use thm11::run_thm11;
pub use thm12::run_thm12;

use crate::config::{MetricChoice, ScenarioConfig, ScenarioKind};
use crate::error::{CliError, Result};
use crate::report::{ReportSummary, Run};

pub fn run(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    match cfg.scenario.kind {
        ScenarioKind::Thm11 => run_thm11(cfg),
        ScenarioKind::Thm12 => run_thm12(cfg),
        ScenarioKind::Identities => run_identities(cfg),
        ScenarioKind::Rigidity => run_rigidity(cfg),
        ScenarioKind::Certify => run_certify(cfg),
        ScenarioKind::Convergence => run_convergence(cfg),
        ScenarioKind::Dnmap => run_dnmap(cfg),
        ScenarioKind::Solve => run_solve(cfg),
    }
}

pub(crate) fn build_metric(cfg: &ScenarioConfig, grid: &SpacetimeGrid, choice: MetricChoice) -> Result<MetricSpec> {
    let base = MetricSpec::static_base(grid, cfg.base.clone())?;
    Ok(match choice {
        MetricChoice::Minkowski => MetricSpec::minkowski(grid),
        MetricChoice::Base => base,
        MetricChoice::Scaled => scale_metric(&base, cfg.factor.build()?.into())?,
    })
}

/// Fails unless the slab of `factor` keeps its distance from `patch`.
pub(crate) fn require_clearance(factor: &PlaneWaveFactor, patch: &BoundaryPatch, grid: &SpacetimeGrid) -> Result<f64> {
    let r = support_clearance_check(factor, patch, grid, None);
    if r.passed {
        return Ok(r.margin);
    }
    let shown: Vec<String> = r.violations.iter().take(8).map(|(k, node)| format!("(k={k}, node={node})")).collect();
    Err(CliError::Precondition(format!(
        "factor support reaches patch {} on the {}-node grid: margin {:.4e} < required {:.4e}; {} violating nodes, first {}",
        patch.id,
        grid.nodes_per_axis(),
        r.margin,
        r.required,
        r.violations.len(),
        shown.join(" ")
    )))
}

pub(crate) fn write_dn(run: &mut Run, stem: &str, m: &DnMatrix, grid: &SpacetimeGrid) -> Result<()> {
    let mut csv = Vec::new();
    m.write_csv(grid, &mut csv)?;
    let side = m.sidecar(&csv);
    run.write(&format!("{stem}.csv"), &csv)?;
    run.write_json(&format!("{stem}.json"), &side)
}

/// `(t, x¹, R₀₀, max|R|)` on the line through `x₀` along `x¹`, every time level.
pub(crate) fn residual_slice(factor: &PlaneWaveFactor, grid: &SpacetimeGrid) -> Result<Vec<Vec<f64>>> {
    let nodes = grid.nodes_per_axis();
    let mut multi: Vec<usize> = factor
        .x0()
        .iter()
        .zip(grid.lower_corner())
        .map(|(x, lo)| (((x - lo) / grid.h()).round().max(0.0) as usize).min(nodes - 1))
        .collect();
    let mut rows = Vec::with_capacity(grid.levels() * nodes);
    for k in 0..grid.levels() {
        for i in 0..nodes {
            multi[0] = i;
            let p = grid.point(k, grid.spatial_index(&multi));
            let r = hessian_obstruction(&log_factor_jet(factor, &p)?);
            let worst = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
            rows.push(vec![p[0], p[1], r[0], worst]);
        }
    }
    Ok(rows)
}

/// Observed orders between successive entries of a halving ladder.
pub(crate) fn ladder_orders(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| conflab::solver::observed_order(w[0], w[1], 2.0).unwrap_or(f64::NAN))
        .collect()
}

pub(crate) fn min_or_nan(v: &[f64]) -> f64 {
    if v.is_empty() || v.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        v.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn max_c(metric: &MetricSpec) -> f64 {
    let g = metric.grid();
    let spatial = g.spatial_len();
    (0..g.len())
        .map(|idx| metric.c_node(idx / spatial, idx % spatial))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `[1.234e-3, 5.678e-4]`.
pub(crate) fn sci_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}
