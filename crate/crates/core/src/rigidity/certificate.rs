//! Hessian obstruction to `φ*η = e^{2h}η`.
//!
//! Flatness of both sides forces `P(e^{2h}η) = 0`, i.e.
//! `R_kl = ∂_k∂_l h − ∂_k h ∂_l h + ½ η(dh, dh) η_kl = 0`. For the plane-wave
//! factor, `h = ((p−2)/2) ln f` has `dh = 0` and `∂_t²h < 0` on the slab
//! centre, so `R_00 ≠ 0` there and no such `φ` exists.

use serde::{Deserialize, Serialize};

use crate::conformal::conformal_power;
use crate::conformal::plane_wave::PlaneWaveFactor;
use crate::error::{LabError, Result};
use crate::function::{Jet, SpacetimeFunction};
use crate::grid::SpacetimeGrid;
use crate::par;
use crate::stencil;

/// Ratio between the residual and its error estimate needed for a
/// non-isometric verdict.
pub const VERDICT_FACTOR: f64 = 10.0;

/// `R_kl` from the jet of `h` (row-major `m × m`).
pub fn hessian_obstruction(h: &Jet) -> Vec<f64> {
    let m = h.dim();
    let dh = &h.grad;
    let q = -dh[0] * dh[0] + dh[1..].iter().map(|v| v * v).sum::<f64>();
    let mut r = vec![0.0; m * m];
    for k in 0..m {
        for l in 0..m {
            let mut v = h.hess[k * m + l] - dh[k] * dh[l];
            if k == l {
                v += 0.5 * q * if k == 0 { -1.0 } else { 1.0 };
            }
            r[k * m + l] = v;
        }
    }
    r
}

/// Analytic jet of `h = ((p−2)/2) ln f`.
pub fn log_factor_jet(factor: &PlaneWaveFactor, p: &[f64]) -> Result<Jet> {
    let power = conformal_power(p.len() - 1)?;
    Ok(factor.jet(p).ln().scale(0.5 * power))
}

/// `R_00` at the slab centre in closed form: `((p−2)/2)·H''(0)/(1 + H(0))`
/// with `H''(0) = −2A/(e w²)`.
pub fn critical_r00(factor: &PlaneWaveFactor) -> Result<f64> {
    let b = factor.profile();
    let power = conformal_power(factor.theta().len())?;
    let e = std::f64::consts::E;
    let h2 = -2.0 * b.amplitude / (e * b.width * b.width);
    Ok(0.5 * power * h2 / (1.0 + b.amplitude / e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NonIsometric,
    IsometricCompatible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSample {
    pub k: usize,
    pub node: usize,
    pub point: Vec<f64>,
    /// `R_00` from the analytic jet.
    pub r00: f64,
    /// `R_00` from finite differences of the sampled `h`.
    pub fd_r00: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `max_nodes max_kl |R_kl|` with `R` from analytic jets of `h`.
    pub max_residual: f64,
    pub argmax: (usize, usize),
    pub argmax_point: Vec<f64>,
    /// Grid node nearest `(t₀, x₀)`.
    pub critical: CriticalSample,
    /// Closed-form `R_00` at the slab centre.
    pub expected_r00: f64,
    /// `|fd_r00 − r00|` at the critical node: the realised O(h²) error of the
    /// finite-difference cross-check.
    pub discretisation: f64,
    pub roundoff_floor: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn nearest_node(grid: &SpacetimeGrid, p: &[f64]) -> (usize, usize) {
    let k = ((p[0] / grid.dt()).round().max(0.0) as usize).min(grid.steps());
    let multi: Vec<usize> = (0..grid.n())
        .map(|a| {
            let i = ((p[a + 1] - grid.lower_corner()[a]) / grid.h()).round().max(0.0) as usize;
            i.min(grid.nodes_per_axis() - 1)
        })
        .collect();
    (k, grid.spatial_index(&multi))
}

/// Finite-difference jet of `h` at `idx`, sampling `h` only on the stencil.
fn fd_log_jet(grid: &SpacetimeGrid, factor: &PlaneWaveFactor, power: f64, idx: usize) -> Jet {
    let spatial = grid.spatial_len();
    let h = |j: usize| 0.5 * power * factor.value(&grid.point(j / spatial, j % spatial)).ln();
    Jet {
        value: h(idx),
        grad: stencil::gradient(grid, idx, h),
        hess: stencil::hessian(grid, idx, h),
    }
}

/// Residual field at every node, its finite-difference cross-check at the
/// slab centre, and the verdict.
pub fn nonisometry_certificate(factor: &PlaneWaveFactor, grid: &SpacetimeGrid) -> Result<CertificateReport> {
    let n = grid.n();
    if factor.theta().len() != n {
        return Err(LabError::Dimension(format!(
            "factor has n = {}, grid has n = {n}",
            factor.theta().len()
        )));
    }
    if grid.m() < 3 {
        return Err(LabError::Dimension("certificate needs n ≥ 2".into()));
    }
    let power = conformal_power(n)?;
    let spatial = grid.spatial_len();
    let per_node = par::map_indexed(grid.len(), |idx| {
        let jet = factor.jet(&grid.point(idx / spatial, idx % spatial)).ln().scale(0.5 * power);
        let scale = max_abs(&jet.hess) + jet.grad.iter().map(|v| v * v).sum::<f64>();
        (max_abs(&hessian_obstruction(&jet)), scale)
    });
    let (mut max_residual, mut arg, mut scale) = (0.0, 0, 0.0f64);
    for (idx, &(v, s)) in per_node.iter().enumerate() {
        scale = scale.max(s);
        if v > max_residual {
            max_residual = v;
            arg = idx;
        }
    }

    let mut centre = vec![factor.t0()];
    centre.extend_from_slice(factor.x0());
    let (k, node) = nearest_node(grid, &centre);
    let p = grid.point(k, node);
    let critical = CriticalSample {
        k,
        node,
        r00: hessian_obstruction(&log_factor_jet(factor, &p)?)[0],
        fd_r00: hessian_obstruction(&fd_log_jet(grid, factor, power, k * spatial + node))[0],
        point: p,
    };
    let discretisation = (critical.fd_r00 - critical.r00).abs();
    let roundoff_floor = 64.0 * f64::EPSILON * (1.0 + scale);
    let tolerance = discretisation + roundoff_floor;
    let verdict = if max_residual > VERDICT_FACTOR * tolerance {
        Verdict::NonIsometric
    } else {
        Verdict::IsometricCompatible
    };
    Ok(CertificateReport {
        max_residual,
        argmax: (arg / spatial, arg % spatial),
        argmax_point: grid.point(arg / spatial, arg % spatial),
        critical,
        expected_r00: critical_r00(factor)?,
        discretisation,
        roundoff_floor,
        tolerance,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::bump::BumpProfile;

    #[test]
    fn zero_amplitude_is_isometric_compatible() {
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        let f = PlaneWaveFactor::new(vec![1.0, 0.0], vec![0.5, 0.5], 0.5, BumpProfile::new(0.0, 0.2, 0.0).unwrap())
            .unwrap();
        let r = nonisometry_certificate(&f, &g).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.verdict, Verdict::IsometricCompatible);
        assert_eq!(critical_r00(&f).unwrap(), 0.0);
    }
}
