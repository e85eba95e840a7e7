//! Scaled Minkowski metric with the same Γ-to-Γ boundary data as Minkowski.

use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::conformal::{scale_metric, transport_solution};
use conflab::dn::{assemble_dn_matrix, compare_dn, make_source_basis};
use conflab::rigidity::{nonisometry_certificate, Verdict};
use conflab::function::SpacetimeFunction;
use conflab::solver::{solve, BoundarySource, SolverConfig, Stepper};
use conflab::{MetricSpec, SpacetimeGrid};

use super::{ladder_orders, max_c, min_or_nan, require_clearance, residual_slice, sci_list, write_dn};
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

const DN_TOLERANCE: f64 = 0.05;
const REFINEMENT_GAIN: f64 = 2.0;
const CONTROL_RATIO: f64 = 10.0;
const MIN_C_EXCESS: f64 = 0.5;
const TRANSPORT_ORDER: f64 = 1.0;

/// Single bump in the middle of the source patch, fixed in physical units so
/// every level of the oracle ladder solves the same problem.
fn oracle_source(cfg: &ScenarioConfig, grid: &SpacetimeGrid) -> Result<BoundarySource> {
    let spec = cfg.patch_spec(&cfg.dn.sources)?;
    let face = &spec.faces[0];
    let tangential = face
        .ranges
        .iter()
        .map(|&(lo, hi)| (0.5 * (lo + hi), 0.3 * (hi - lo)))
        .collect();
    let (t0, t1) = spec.time;
    let patch = cfg.patch(grid, &spec.id)?;
    Ok(BoundarySource::new(
        grid,
        &patch,
        conflab::Face::new(face.axis, face.side),
        tangential,
        (0.5 * (t0 + t1), 0.25 * (t1 - t0)),
        1.0,
    )?)
}

pub fn run_thm11(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let factor = cfg.factor.build()?;
    let dn_cfg = cfg.dn.dn_config();
    let mut level_rows = Vec::new();
    let mut rel = Vec::new();
    let mut nodes = Vec::new();

    for level in cfg.grid.levels() {
        let g = cfg.grid.grid(level)?;
        let n = g.nodes_per_axis();
        let sources = cfg.patch(&g, &cfg.dn.sources)?;
        let receivers = cfg.patch(&g, &cfg.dn.receivers)?;
        let patches = if sources.id == receivers.id { vec![&sources] } else { vec![&sources, &receivers] };
        for p in patches {
            let margin = require_clearance(&factor, p, &g)?;
            run.check(Check::at_least(&format!("clearance_{}_{n}", p.id), margin, 2.0 * g.h()));
        }
        let eta = MetricSpec::minkowski(&g);
        let scaled = scale_metric(&eta, factor.clone().into())?;
        let basis = make_source_basis(&g, &sources, &cfg.dn.counts)?;
        let lambda_eta = assemble_dn_matrix(&eta, &sources, &receivers, &basis, &dn_cfg)?;
        let lambda_scaled = assemble_dn_matrix(&scaled, &sources, &receivers, &basis, &dn_cfg)?;
        let cmp = compare_dn(&lambda_scaled, &lambda_eta)?;
        write_dn(&mut run, &format!("dn_eta_{n}"), &lambda_eta, &g)?;
        write_dn(&mut run, &format!("dn_scaled_{n}"), &lambda_scaled, &g)?;
        let c_excess = max_c(&scaled) - 1.0;

        let control = if cfg.thm11.run_control {
            // the control slab crosses Γ by design, so no clearance requirement
            let cf = cfg.thm11.control.build()?;
            let crossing = scale_metric(&eta, cf.into())?;
            let m = assemble_dn_matrix(&crossing, &sources, &receivers, &basis, &dn_cfg)?;
            write_dn(&mut run, &format!("dn_control_{n}"), &m, &g)?;
            compare_dn(&m, &lambda_eta)?.relative_frobenius
        } else {
            f64::NAN
        };

        run.headline(format!("dn_relative_frobenius_{n}"), cmp.relative_frobenius);
        run.headline(format!("max_c_minus_1_{n}"), c_excess);
        if level == 0 {
            run.check(Check::at_most(
                &format!("dn_relative_frobenius_{n}"),
                cmp.relative_frobenius,
                DN_TOLERANCE,
            ));
            run.check(Check::at_least("max_c_minus_1", c_excess, MIN_C_EXCESS));
            if cfg.thm11.run_control {
                run.headline(format!("control_relative_frobenius_{n}"), control);
                run.check(Check::at_least(
                    &format!("control_ratio_{n}"),
                    control / cmp.relative_frobenius,
                    CONTROL_RATIO,
                ));
            }
        }
        level_rows.push(vec![
            level as f64,
            n as f64,
            g.h(),
            cmp.relative_frobenius,
            cmp.max_abs_difference,
            cmp.reference_frobenius,
            control,
            c_excess,
        ]);
        rel.push(cmp.relative_frobenius);
        nodes.push(n);
    }
    for (w, n) in rel.windows(2).zip(nodes.windows(2)) {
        run.check(Check::at_least(
            &format!("dn_refinement_gain_{}_{}", n[0], n[1]),
            w[0] / w[1],
            REFINEMENT_GAIN,
        ));
    }
    run.write_table(
        "dn_levels.csv",
        &[
            "level",
            "nodes",
            "h",
            "relative_frobenius",
            "max_abs_difference",
            "reference_frobenius",
            "control_relative_frobenius",
            "max_c_minus_1",
        ],
        &level_rows,
    )?;
    let mut dn_plot = PlotSpec::new(
        "dn_difference",
        "Relative Frobenius difference of the DN matrices",
        "dn_levels.csv",
        PlotStyle::LogY,
        (2, "nodes per axis"),
        "‖Λ_g̃ − Λ_η‖_F / ‖Λ_η‖_F",
    )
    .series(4, "scaled vs Minkowski");
    if cfg.thm11.run_control {
        dn_plot = dn_plot.series(7, "control slab crossing Γ");
    }
    run.plot(dn_plot);

    transport_oracle(cfg, &mut run, &factor)?;

    let g0 = cfg.grid.grid(0)?;
    let cert = nonisometry_certificate(&factor, &g0)?;
    let margin = cert.critical.r00.abs() / cert.tolerance;
    run.headline("certificate_r00", cert.critical.r00);
    run.headline("certificate_tolerance", cert.tolerance);
    run.headline("certificate_max_residual", cert.max_residual);
    run.check(
        Check::at_least("certificate_margin", margin, conflab::rigidity::certificate::VERDICT_FACTOR)
            .with_detail(format!("R00 = {:.6e}, tolerance = {:.3e}", cert.critical.r00, cert.tolerance)),
    );
    run.check(Check::holds(
        "certificate_non_isometric",
        cert.verdict == Verdict::NonIsometric,
        cert.max_residual,
    ));
    run.write_json("certificate.json", &cert)?;
    run.write_table(
        "residual_slice.csv",
        &["t", "x1", "r00", "max_abs_r"],
        &residual_slice(&factor, &g0)?,
    )?;
    run.plot(
        PlotSpec::new(
            "residual_slice",
            "Hessian obstruction R_00 along x¹ through x₀",
            "residual_slice.csv",
            PlotStyle::Heatmap,
            (1, "t"),
            "x¹",
        )
        .series(2, "R_00"),
    );

    if !cfg.thm11.amplitude_sweep.is_empty() {
        amplitude_sweep(cfg, &mut run)?;
    }
    run.finish()
}

/// `max_{k,x} |ũ_k(x) − u_k(x)/f(t_k, x)|`, stepping both solvers together so
/// no level is stored.
fn streamed_transport_error(
    eta: &MetricSpec,
    scaled: &MetricSpec,
    factor: &PlaneWaveFactor,
    src: &BoundarySource,
) -> Result<f64> {
    let g = eta.grid();
    let fk = |k: usize| -> Vec<f64> { (0..g.spatial_len()).map(|i| factor.value(&g.point(k, i))).collect() };
    let gap = |k: usize, u: &[f64], v: &[f64]| {
        u.iter().zip(v).zip(fk(k)).map(|((a, b), f)| (b - a / f).abs()).fold(0.0, f64::max)
    };
    let mut flat = Stepper::new(eta, src)?;
    let mut curved = Stepper::new(scaled, src)?;
    let mut worst = gap(0, flat.previous(), curved.previous()).max(gap(1, flat.current(), curved.current()));
    while !flat.is_done() {
        flat.advance()?;
        curved.advance()?;
        worst = worst.max(gap(flat.level(), flat.current(), curved.current()));
    }
    Ok(worst)
}

fn transport_oracle(cfg: &ScenarioConfig, run: &mut Run, factor: &PlaneWaveFactor) -> Result<()> {
    if cfg.thm11.transport_levels < 3 {
        return Err(CliError::Config(format!(
            "thm11.transport_levels = {} but two refinements need 3 grids",
            cfg.thm11.transport_levels
        )));
    }
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for level in 0..cfg.thm11.transport_levels as u32 {
        let g = cfg.grid.grid(level)?;
        let n = g.nodes_per_axis();
        let patch = cfg.patch(&g, &cfg.dn.sources)?;
        require_clearance(factor, &patch, &g)?;
        let src = oracle_source(cfg, &g)?;
        let eta = MetricSpec::minkowski(&g);
        let scaled = scale_metric(&eta, factor.clone().into())?;
        let err = streamed_transport_error(&eta, &scaled, factor, &src)?;
        if level == 0 {
            // the streamed comparison must agree with the stored-field oracle
            let direct = solve(&scaled, &src, &SolverConfig::default())?;
            let oracle = transport_solution(&factor.clone().into(), &solve(&eta, &src, &SolverConfig::default())?)?;
            let stored = match (direct.full(), oracle.full()) {
                (Some(a), Some(b)) => a.zip_with(b, |x, y| x - y)?.max_abs(),
                _ => unreachable!("default solver storage is full"),
            };
            run.check(Check::at_most("transport_streamed_matches_stored", (stored - err).abs(), 1e-14));
        }
        rows.push(vec![n as f64, g.h(), err]);
        errors.push(err);
    }
    let orders = ladder_orders(&errors);
    for (i, o) in orders.iter().enumerate() {
        run.headline(format!("transport_order_{}", rows[i + 1][0]), *o);
    }
    run.headline("transport_error_finest", *errors.last().unwrap_or(&f64::NAN));
    run.check(
        Check::at_least("transport_order_min", min_or_nan(&orders), TRANSPORT_ORDER)
            .with_detail(format!("errors {}", sci_list(&errors))),
    );
    run.write_table("transport.csv", &["nodes", "h", "max_abs_error"], &rows)?;
    run.plot(
        PlotSpec::new(
            "transport_convergence",
            "Transport oracle: solve(g̃) − f⁻¹·solve(η)",
            "transport.csv",
            PlotStyle::LogLog,
            (2, "h"),
            "max abs error",
        )
        .series(3, "‖ũ − f⁻¹u‖_∞"),
    );
    Ok(())
}

fn amplitude_sweep(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let g = cfg.grid.grid(0)?;
    let sources = cfg.patch(&g, &cfg.dn.sources)?;
    let receivers = cfg.patch(&g, &cfg.dn.receivers)?;
    let eta = MetricSpec::minkowski(&g);
    let basis = make_source_basis(&g, &sources, &cfg.dn.counts)?;
    let dn_cfg = cfg.dn.dn_config();
    let reference = assemble_dn_matrix(&eta, &sources, &receivers, &basis, &dn_cfg)?;
    let mut rows = Vec::new();
    for &a in &cfg.thm11.amplitude_sweep {
        let f = cfg.factor.with_amplitude(a).build()?;
        require_clearance(&f, &sources, &g)?;
        require_clearance(&f, &receivers, &g)?;
        let scaled = scale_metric(&eta, f.into())?;
        let m = assemble_dn_matrix(&scaled, &sources, &receivers, &basis, &dn_cfg)?;
        rows.push(vec![a, compare_dn(&m, &reference)?.relative_frobenius, max_c(&scaled) - 1.0]);
    }
    let worst = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    run.check(Check::at_most("sweep_dn_relative_frobenius_max", worst, DN_TOLERANCE));
    run.write_table("amplitude_sweep.csv", &["amplitude", "relative_frobenius", "max_c_minus_1"], &rows)?;
    run.plot(
        PlotSpec::new(
            "amplitude_sweep",
            "DN difference and conformal factor size against amplitude",
            "amplitude_sweep.csv",
            PlotStyle::LogY,
            (1, "A"),
            "value",
        )
        .series(2, "relative DN difference")
        .series(3, "max |c − 1|"),
    );
    Ok(())
}
