//! Conformal factors, the hidden conformal invariance
//! `□_{f^{p−2}g}(f⁻¹u) = f^{1−p}□_g u − u f^{−p}□_g f`, and the Schrödinger
//! reduction `q = −f⁻¹□_η f`.

pub mod bump;
pub mod divergence;
pub mod manufactured;
pub mod plane_wave;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dn::patch::BoundaryPatch;
use crate::error::{LabError, Result};
use crate::field::{for_each_point, ScalarField};
use crate::geometry::wave_operator_residual;
use crate::grid::SpacetimeGrid;
use crate::metric::{Factor, MetricSpec, TimeLevel};
use crate::solver::WaveField;

use plane_wave::PlaneWaveFactor;

/// `p = 2(n+1)/(n−1)`.
pub fn exponent_p(n: usize) -> Result<Rational64> {
    if n < 2 {
        return Err(LabError::Dimension(format!("p needs n ≥ 2, got n = {n}")));
    }
    let n = n as i64;
    Ok(Rational64::new(2 * (n + 1), n - 1))
}

/// `p − 2 = 4/(n−1)`.
pub fn exponent_p_minus_2(n: usize) -> Result<Rational64> {
    Ok(exponent_p(n)? - Rational64::from_integer(2))
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `p` as a float.
pub fn p_value(n: usize) -> Result<f64> {
    exponent_p(n).map(to_f64)
}

/// Power `p − 2` carried by the conformal factor of the scaled metric.
pub fn conformal_power(n: usize) -> Result<f64> {
    exponent_p_minus_2(n).map(to_f64)
}

/// `α_m = (m−2)/(4(m−1))`.
pub fn alpha(m: usize) -> f64 {
    (m as f64 - 2.0) / (4.0 * (m as f64 - 1.0))
}

/// `f^{p−2}·base`; returns `base` unchanged when `f ≡ 1`.
pub fn scale_metric(base: &MetricSpec, f: Factor) -> Result<MetricSpec> {
    if f.is_identity() {
        return Ok(base.clone());
    }
    base.with_factor(f, conformal_power(base.n())?)
}

/// Nodal values of a factor.
pub fn factor_field(grid: &SpacetimeGrid, f: &Factor) -> Result<ScalarField> {
    if let Some(g) = f.grid() {
        if g != grid {
            return Err(LabError::GridMismatch("factor sampled on a different grid".into()));
        }
    }
    let spatial = grid.spatial_len();
    let mut values = vec![0.0; grid.len()];
    for_each_point(grid, |idx, p| {
        values[idx] = f.value_at(p, TimeLevel::Node(idx / spatial), idx % spatial);
    });
    if let Some(idx) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(LabError::NonPositive {
            what: "conformal factor",
            value: values[idx],
            node: idx,
        });
    }
    ScalarField::from_values(grid, values)
}

/// `ũ = f⁻¹u` on every stored value of `u`.
pub fn transport_solution(f: &Factor, u: &WaveField) -> Result<WaveField> {
    let grid = u.grid();
    if let Some(g) = f.grid() {
        if g != grid {
            return Err(LabError::GridMismatch("factor and field grids differ".into()));
        }
    }
    if f.is_identity() {
        return Ok(u.clone());
    }
    let positions: Vec<Vec<f64>> = (0..grid.spatial_len()).map(|i| grid.position(i)).collect();
    let mut bad = None;
    let out = u.map_indexed(|v, k, node| {
        let mut p = Vec::with_capacity(grid.m());
        p.push(grid.time(k));
        p.extend_from_slice(&positions[node]);
        let fv = f.value_at(&p, TimeLevel::Node(k), node);
        if !(fv > 0.0) {
            bad = Some((fv, k * grid.spatial_len() + node));
        }
        v / fv
    });
    if let Some((value, node)) = bad {
        return Err(LabError::NonPositive {
            what: "conformal factor",
            value,
            node,
        });
    }
    Ok(out)
}

/// `□_{f^{p−2}g}(f⁻¹u) − f^{1−p}□_g u + u f^{−p}□_g f`.
pub fn invariance_residual(base: &MetricSpec, f: &Factor, u: &ScalarField) -> Result<ScalarField> {
    let grid = base.grid();
    let fv = factor_field(grid, f)?;
    let p = p_value(base.n())?;
    let scaled = scale_metric(base, f.clone())?;
    let lhs = wave_operator_residual(&scaled, &u.zip_with(&fv, |a, b| a / b)?)?;
    let box_u = wave_operator_residual(base, u)?;
    let box_f = wave_operator_residual(base, &fv)?;
    let values = (0..grid.len())
        .map(|i| {
            let (fi, ui) = (fv.values()[i], u.values()[i]);
            lhs.values()[i] - fi.powf(1.0 - p) * box_u.values()[i] + ui * fi.powf(-p) * box_f.values()[i]
        })
        .collect();
    ScalarField::from_values(grid, values)
}

/// `q = −f⁻¹□_η f` (equal to `f⁻¹Δf` for static `f`).
pub fn schrodinger_potential(grid: &SpacetimeGrid, f: &Factor) -> Result<ScalarField> {
    let fv = factor_field(grid, f)?;
    let box_f = wave_operator_residual(&MetricSpec::minkowski(grid), &fv)?;
    box_f.zip_with(&fv, |b, f| -b / f)
}

/// Outcome of the support-clearance precondition of a plane-wave factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearanceReport {
    pub passed: bool,
    /// `min |phase| − w` over the closed patch; `+∞` when `H ≡ 0`.
    pub margin: f64,
    pub required: f64,
    /// `(k, node)` of closed-patch nodes closer than `w + required` to the plane.
    pub violations: Vec<(usize, usize)>,
}

/// `|(x−x₀)·θ − (t−t₀)| ≥ w + margin_min` on every node of the closed patch,
/// so `f ≡ 1` and `∂_ν f ≡ 0` near it. `margin_min` defaults to `2h`.
pub fn support_clearance_check(
    factor: &PlaneWaveFactor,
    patch: &BoundaryPatch,
    grid: &SpacetimeGrid,
    margin_min: Option<f64>,
) -> ClearanceReport {
    let required = margin_min.unwrap_or(2.0 * grid.h());
    let profile = factor.profile();
    if profile.is_zero() {
        return ClearanceReport {
            passed: true,
            margin: f64::INFINITY,
            required,
            violations: Vec::new(),
        };
    }
    let mut margin = f64::INFINITY;
    let mut violations = Vec::new();
    let nodes = patch.closed_nodes(grid);
    for k in patch.closed_steps(grid) {
        for &node in &nodes {
            let p = grid.point(k, node);
            let d = (factor.phase(&p) - profile.center).abs() - profile.width;
            margin = margin.min(d);
            if d < required {
                violations.push((k, node));
            }
        }
    }
    ClearanceReport {
        passed: violations.is_empty(),
        margin,
        required,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Polynomial2;

    #[test]
    fn exponents() {
        assert_eq!(exponent_p(2).unwrap(), Rational64::from_integer(6));
        assert_eq!(exponent_p(3).unwrap(), Rational64::from_integer(4));
        assert_eq!(exponent_p(5).unwrap(), Rational64::from_integer(3));
        assert_eq!(exponent_p_minus_2(5).unwrap(), Rational64::from_integer(1));
        assert_eq!(exponent_p(4).unwrap(), Rational64::new(10, 3));
        assert!(exponent_p(1).is_err());
        assert_eq!(alpha(3), 0.125);
    }

    #[test]
    fn identity_factor_keeps_base() {
        let g = SpacetimeGrid::unit(2, 9, 0.5, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let same = scale_metric(&eta, Polynomial2::constant(3, 1.0).into()).unwrap();
        assert_eq!(same.descriptor(), eta.descriptor());
        assert!(same.factors().is_empty());
    }

    #[test]
    fn static_quadratic_potential() {
        let g = SpacetimeGrid::unit(2, 9, 0.5, 0.5).unwrap();
        let f = Polynomial2::radial(3, 1.0, 0.1);
        let q = schrodinger_potential(&g, &f.clone().into()).unwrap();
        let fv = ScalarField::sample(&g, |p| {
            use crate::function::SpacetimeFunction;
            f.value(p)
        });
        for i in 0..g.len() {
            assert!((q.values()[i] - 0.4 / fv.values()[i]).abs() < 1e-9);
        }
    }
}
