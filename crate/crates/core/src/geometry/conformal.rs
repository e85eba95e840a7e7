//! Grid checks of the conformal wave operator `ℒ_g = □_g + α_m R(g)` and of
//! the scalar-curvature scaling law.

use std::sync::Arc;

use crate::conformal::{alpha, conformal_power, p_value};
use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::metric::{Factor, MetricSpec};

use super::{scalar_curvature, wave_operator_residual};

fn check_factor(base: &MetricSpec, f: &ScalarField) -> Result<()> {
    if f.grid() != base.grid() {
        return Err(LabError::GridMismatch("factor and metric grids differ".into()));
    }
    if let Some(idx) = f.values().iter().position(|&v| !(v > 0.0)) {
        return Err(LabError::NonPositive {
            what: "f",
            value: f.values()[idx],
            node: idx,
        });
    }
    if base.m() < 3 {
        return Err(LabError::Dimension("conformal wave operator needs n ≥ 2".into()));
    }
    Ok(())
}

/// `f^{p−2}·base` with `f` taken as gridded values.
pub fn scaled_by_field(base: &MetricSpec, f: &ScalarField) -> Result<MetricSpec> {
    base.with_factor(Factor::Sampled(Arc::new(f.clone())), conformal_power(base.n())?)
}

/// `R(f^{p−2}g) − f^{1−p}(α_m^{−1}□_g f + R(g) f)`.
pub fn scalar_curvature_conformal_check(base: &MetricSpec, f: &ScalarField) -> Result<ScalarField> {
    check_factor(base, f)?;
    let scaled = scaled_by_field(base, f)?;
    let r_scaled = scalar_curvature(&scaled)?;
    let r_base = scalar_curvature(base)?;
    let box_f = wave_operator_residual(base, f)?;
    scalar_curvature_residual(base.m(), f, &r_scaled, &r_base, &box_f)
}

/// Pointwise residual of the scaling law from precomputed pieces.
pub fn scalar_curvature_residual(
    m: usize,
    f: &ScalarField,
    r_scaled: &ScalarField,
    r_base: &ScalarField,
    box_f: &ScalarField,
) -> Result<ScalarField> {
    let p = p_value(m - 1)?;
    let inv_alpha = 1.0 / alpha(m);
    let values = (0..f.values().len())
        .map(|i| {
            let fi = f.values()[i];
            r_scaled.values()[i] - fi.powf(1.0 - p) * (inv_alpha * box_f.values()[i] + r_base.values()[i] * fi)
        })
        .collect();
    ScalarField::from_values(f.grid(), values)
}

/// `ℒ_{f^{p−2}g}(f⁻¹u) − f^{1−p}ℒ_g u`.
pub fn conformal_wave_operator_residual(base: &MetricSpec, f: &ScalarField, u: &ScalarField) -> Result<ScalarField> {
    check_factor(base, f)?;
    let scaled = scaled_by_field(base, f)?;
    let r_scaled = scalar_curvature(&scaled)?;
    let r_base = scalar_curvature(base)?;
    let box_scaled = wave_operator_residual(&scaled, &u.zip_with(f, |a, b| a / b)?)?;
    let box_base = wave_operator_residual(base, u)?;
    conformal_wave_residual(base.m(), f, u, &r_scaled, &r_base, &box_scaled, &box_base)
}

/// Pointwise residual of the conformal invariance from precomputed pieces.
pub fn conformal_wave_residual(
    m: usize,
    f: &ScalarField,
    u: &ScalarField,
    r_scaled: &ScalarField,
    r_base: &ScalarField,
    box_scaled: &ScalarField,
    box_base: &ScalarField,
) -> Result<ScalarField> {
    let p = p_value(m - 1)?;
    let a = alpha(m);
    let values = (0..f.values().len())
        .map(|i| {
            let (fi, ui) = (f.values()[i], u.values()[i]);
            let lhs = box_scaled.values()[i] + a * r_scaled.values()[i] * ui / fi;
            let rhs = fi.powf(1.0 - p) * (box_base.values()[i] + a * r_base.values()[i] * ui);
            lhs - rhs
        })
        .collect();
    ScalarField::from_values(f.grid(), values)
}
