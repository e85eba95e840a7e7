//! `f = 1 + λF` with `F` the base-metric solution driven by boundary data `Ψ`
//! supported away from the measurement patches.

use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::SpacetimeGrid;
use crate::metric::{sampled_value, MetricSpec, TimeLevel};
use crate::solver::{solve, BoundarySource, SolverConfig, Storage};

/// Largest admissible `λ·max|F|`; keeps `f ≥ 1/2`.
pub const LAMBDA_BOUND: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ManufacturedFactor {
    lambda: f64,
    psi: BoundarySource,
    field: Arc<ScalarField>,
}

/// `min(λ_user, 0.5/max|F|)`.
pub fn admissible_lambda(lambda_user: f64, max_abs_f: f64) -> Result<f64> {
    if !(lambda_user > 0.0) {
        return Err(LabError::InvalidArgument(format!("λ must be > 0, got {lambda_user}")));
    }
    if !(max_abs_f > 0.0) {
        return Err(LabError::Source(
            "F ≡ 0: Ψ must not vanish identically (f ≡ 1 is the trivial family)".into(),
        ));
    }
    Ok(lambda_user.min(LAMBDA_BOUND / max_abs_f))
}

impl ManufacturedFactor {
    /// Solves `□_g F = 0`, `F|_Σ = Ψ` on `base` with full storage and applies
    /// the λ rule.
    pub fn build(base: &MetricSpec, psi: BoundarySource, lambda_user: f64, memory_cap_bytes: usize) -> Result<Self> {
        let cfg = SolverConfig {
            storage: Storage::Full,
            memory_cap_bytes,
        };
        let field = solve(base, &psi, &cfg)?
            .into_full()
            .expect("full storage requested");
        Self::from_parts(field, psi, lambda_user)
    }

    pub fn from_parts(field: ScalarField, psi: BoundarySource, lambda_user: f64) -> Result<Self> {
        let lambda = admissible_lambda(lambda_user, field.max_abs())?;
        Ok(ManufacturedFactor {
            lambda,
            psi,
            field: Arc::new(field),
        })
    }

    /// Same `F` and `Ψ`, new `λ` (subject to the same rule).
    pub fn with_lambda(&self, lambda_user: f64) -> Result<Self> {
        Ok(ManufacturedFactor {
            lambda: admissible_lambda(lambda_user, self.field.max_abs())?,
            psi: self.psi.clone(),
            field: Arc::clone(&self.field),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn psi(&self) -> &BoundarySource {
        &self.psi
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        self.field.grid()
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == 0.0 || self.field.max_abs() == 0.0
    }

    pub fn value_at(&self, level: TimeLevel, node: usize) -> f64 {
        1.0 + self.lambda * sampled_value(&self.field, level, node)
    }

    pub fn descriptor(&self) -> String {
        format!(
            "manufactured(λ={}, Ψ@{}:{}, max|F|={})",
            self.lambda,
            self.psi.patch_id,
            self.psi.face.label(),
            self.field.max_abs()
        )
    }
}
