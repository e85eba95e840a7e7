//! Curved static base with a manufactured factor `f = 1 + λF`, `□_g F = 0`,
//! `F|_Σ = Ψ`, compared on disjoint patches.

use std::sync::Arc;

use conflab::conformal::manufactured::ManufacturedFactor;
use conflab::conformal::scale_metric;
use conflab::dn::{assemble_dn_matrix, compare_dn, disjointness_check, make_source_basis, BoundaryPatch};
use conflab::solver::convergence::least_squares_slope;
use conflab::solver::{solve, SolverConfig};
use conflab::{Factor, MetricSpec, SpacetimeGrid};

use super::{max_c, write_dn};
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

const DN_TOLERANCE: f64 = 0.05;
const TRACE_TOLERANCE: f64 = 1e-12;
const LAMBDA_EXPONENT: (f64, f64) = (0.8, 1.2);

fn require_disjoint(grid: &SpacetimeGrid, a: &BoundaryPatch, b: &BoundaryPatch) -> Result<()> {
    if disjointness_check(grid, a, b) {
        Ok(())
    } else {
        Err(CliError::Precondition(format!(
            "patches {} and {} share boundary nodes on the {}-node grid",
            a.id,
            b.id,
            grid.nodes_per_axis()
        )))
    }
}

pub fn run_thm12(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    if cfg.thm12.psi_amplitude == 0.0 {
        return Err(CliError::Precondition(
            "Ψ ≡ 0 gives F ≡ 0 and f ≡ 1; the factor data must not vanish identically".into(),
        ));
    }
    let mut run = Run::start(cfg)?;
    let dn_cfg = cfg.dn.dn_config();
    let lambdas = &cfg.thm12.lambdas;
    let mut level_rows = Vec::new();
    let mut sweep_rows = Vec::new();
    let mut headline_rel = Vec::new();
    let mut nodes = Vec::new();

    for level in cfg.grid.levels() {
        let g = cfg.grid.grid(level)?;
        let n = g.nodes_per_axis();
        let g1 = cfg.patch(&g, &cfg.dn.sources)?;
        let g2 = cfg.patch(&g, &cfg.dn.receivers)?;
        let psi_patch = cfg.patch(&g, &cfg.thm12.psi_patch)?;
        require_disjoint(&g, &g1, &g2)?;
        require_disjoint(&g, &psi_patch, &g1)?;
        require_disjoint(&g, &psi_patch, &g2)?;

        let base = MetricSpec::static_base(&g, cfg.base.clone())?;
        let psi = make_source_basis(&g, &psi_patch, &vec![1; g.n()])?
            .remove(0)
            .scaled(cfg.thm12.psi_amplitude);
        let factor = ManufacturedFactor::build(&base, psi, lambdas[0], dn_cfg.memory_cap_bytes)?;
        let basis = make_source_basis(&g, &g1, &cfg.dn.counts)?;
        let reference = assemble_dn_matrix(&base, &g1, &g2, &basis, &dn_cfg)?;
        write_dn(&mut run, &format!("dn_base_{n}"), &reference, &g)?;

        for (i, &lam) in lambdas.iter().enumerate() {
            let f = Arc::new(factor.with_lambda(lam)?);
            let scaled = scale_metric(&base, Factor::Manufactured(f.clone()))?;
            let m = assemble_dn_matrix(&scaled, &g1, &g2, &basis, &dn_cfg)?;
            let cmp = compare_dn(&m, &reference)?;
            sweep_rows.push(vec![n as f64, f.lambda(), cmp.relative_frobenius, cmp.max_abs_difference]);
            if i > 0 {
                continue;
            }
            write_dn(&mut run, &format!("dn_scaled_{n}"), &m, &g)?;
            let receivers = g2.nodes(&g);
            let u = solve(
                &scaled,
                &basis[0],
                &SolverConfig::traces(receivers.clone()),
            )?;
            let mut trace = 0.0f64;
            for k in g2.steps() {
                for &node in &receivers {
                    trace = trace.max(u.value(k, node).map_or(f64::INFINITY, f64::abs));
                }
            }
            let c_excess = max_c(&scaled) - 1.0;
            run.check(Check::at_most(&format!("trace_gamma2_{n}"), trace, TRACE_TOLERANCE));
            run.headline(format!("dn_relative_frobenius_{n}"), cmp.relative_frobenius);
            run.headline(format!("lambda_{n}"), f.lambda());
            run.headline(format!("max_c_minus_1_{n}"), c_excess);
            if level == 0 {
                run.check(Check::at_most(
                    &format!("dn_relative_frobenius_{n}"),
                    cmp.relative_frobenius,
                    DN_TOLERANCE,
                ));
            }
            level_rows.push(vec![
                level as f64,
                n as f64,
                g.h(),
                f.lambda(),
                cmp.relative_frobenius,
                cmp.max_abs_difference,
                cmp.reference_frobenius,
                c_excess,
            ]);
            headline_rel.push(cmp.relative_frobenius);
            nodes.push(n);
        }
        if level == 0 && lambdas.len() >= 2 {
            let pts: Vec<(f64, f64)> = sweep_rows.iter().map(|r| (r[1].ln(), r[2].ln())).collect();
            let slope = least_squares_slope(&pts).unwrap_or(f64::NAN);
            run.check(Check::within(
                &format!("lambda_exponent_{n}"),
                slope,
                LAMBDA_EXPONENT.0,
                LAMBDA_EXPONENT.1,
            ));
        }
    }
    for (w, n) in headline_rel.windows(2).zip(nodes.windows(2)) {
        run.check(Check::at_least(&format!("dn_refinement_gain_{}_{}", n[0], n[1]), w[0] / w[1], 1.0));
    }

    run.write_table(
        "dn_levels.csv",
        &[
            "level",
            "nodes",
            "h",
            "lambda",
            "relative_frobenius",
            "max_abs_difference",
            "reference_frobenius",
            "max_c_minus_1",
        ],
        &level_rows,
    )?;
    run.write_table(
        "lambda_sweep.csv",
        &["nodes", "lambda", "relative_frobenius", "max_abs_difference"],
        &sweep_rows,
    )?;
    run.plot(
        PlotSpec::new(
            "dn_difference",
            "Disjoint-data DN difference, manufactured factor",
            "dn_levels.csv",
            PlotStyle::LogY,
            (2, "nodes per axis"),
            "‖Λ_g̃ − Λ_g‖_F / ‖Λ_g‖_F",
        )
        .series(5, "relative Frobenius difference"),
    );
    run.plot(
        PlotSpec::new(
            "lambda_sweep",
            "DN difference against λ",
            "lambda_sweep.csv",
            PlotStyle::LogLog,
            (2, "λ"),
            "relative Frobenius difference",
        )
        .series(3, "all levels"),
    );
    run.finish()
}
