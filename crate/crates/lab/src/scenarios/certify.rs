//! Hessian non-isometry certificate for the plane-wave factor, an amplitude
//! sweep, and the `A = 0` baseline.

use conflab::rigidity::certificate::VERDICT_FACTOR;
use conflab::rigidity::{nonisometry_certificate, Verdict};

use super::residual_slice;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::plots::{PlotSpec, PlotStyle};
use crate::report::{Check, ReportSummary, Run};

/// The O(h²) finite-difference value of `R_00` must agree with the analytic jet.
const FD_RELATIVE_GAP: f64 = 1e-2;

pub fn run_certify(cfg: &ScenarioConfig) -> Result<ReportSummary> {
    let mut run = Run::start(cfg)?;
    let g = cfg.grid.grid(cfg.grid.finest_level)?;
    let factor = cfg.factor.build()?;
    let cert = nonisometry_certificate(&factor, &g)?;
    run.headline("r00", cert.critical.r00);
    run.headline("expected_r00", cert.expected_r00);
    run.headline("fd_r00", cert.critical.fd_r00);
    run.headline("tolerance", cert.tolerance);
    run.check(
        Check::at_least("certificate_margin", cert.critical.r00.abs() / cert.tolerance, VERDICT_FACTOR)
            .with_detail(format!("R00 = {:.6e}, tolerance = {:.3e}", cert.critical.r00, cert.tolerance)),
    );
    run.check(Check::holds("non_isometric", cert.verdict == Verdict::NonIsometric, cert.max_residual));
    run.check(Check::at_most(
        "finite_difference_relative_gap",
        cert.discretisation / cert.critical.r00.abs(),
        FD_RELATIVE_GAP,
    ));
    run.write_json("certificate.json", &cert)?;
    run.write_table("residual_slice.csv", &["t", "x1", "r00", "max_abs_r"], &residual_slice(&factor, &g)?)?;

    let baseline = nonisometry_certificate(&cfg.factor.with_amplitude(0.0).build()?, &g)?;
    run.check(Check::holds(
        "zero_amplitude_isometric_compatible",
        baseline.verdict == Verdict::IsometricCompatible,
        baseline.max_residual,
    ));

    let mut rows = Vec::new();
    for &a in &cfg.certify.amplitudes {
        let c = nonisometry_certificate(&cfg.factor.with_amplitude(a).build()?, &g)?;
        rows.push(vec![a, c.critical.r00, c.max_residual, c.tolerance]);
    }
    rows.sort_by(|x, y| x[0].total_cmp(&y[0]));
    let monotone = rows.windows(2).all(|w| w[1][2] > w[0][2]);
    run.check(Check::holds(
        "residual_monotone_in_amplitude",
        monotone,
        rows.last().map_or(f64::NAN, |r| r[2]),
    ));
    run.write_table("amplitude_sweep.csv", &["amplitude", "r00", "max_residual", "tolerance"], &rows)?;

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
    run.plot(
        PlotSpec::new(
            "amplitude_sweep",
            "Certificate residual against amplitude",
            "amplitude_sweep.csv",
            PlotStyle::LogLog,
            (1, "A"),
            "max |R|",
        )
        .series(3, "max residual")
        .series(4, "tolerance"),
    );
    run.finish()
}
