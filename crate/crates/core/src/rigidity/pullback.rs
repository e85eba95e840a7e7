//! Transformation law of the Christoffel symbols under a diffeomorphism,
//!
//! ```text
//! Γⁱ_kl(φ*g)(x) = (J⁻¹)ⁱ_c [ Γᶜ_ab(g)(φ(x)) Jᵃ_k Jᵇ_l + ∂_k∂_l φᶜ(x) ],   J = dφ,
//! ```
//!
//! checked against Christoffel symbols of the pulled-back metric obtained by
//! central differences of its components.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jet::geometry_at;
use crate::error::{LabError, Result};
use crate::metric::MetricSpec;

/// Analytic diffeomorphisms of `ℝᵐ` with closed-form first and second derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Diffeomorphism {
    Identity,
    /// `x ↦ A x + b`, `A` row-major.
    Affine { matrix: Vec<f64>, offset: Vec<f64> },
    /// `φᵃ(x) = xᵃ + ε sin(ω x^{(a+1) mod m})`.
    Sine { epsilon: f64, omega: f64 },
}

impl Diffeomorphism {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = x.len();
        match self {
            Diffeomorphism::Identity => x.to_vec(),
            Diffeomorphism::Affine { matrix, offset } => (0..m)
                .map(|a| offset[a] + (0..m).map(|b| matrix[a * m + b] * x[b]).sum::<f64>())
                .collect(),
            Diffeomorphism::Sine { epsilon, omega } => (0..m)
                .map(|a| x[a] + epsilon * (omega * x[(a + 1) % m]).sin())
                .collect(),
        }
    }

    /// `Jᵃ_k = ∂_k φᵃ`, row-major.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let m = x.len();
        let mut j = vec![0.0; m * m];
        match self {
            Diffeomorphism::Identity => (0..m).for_each(|a| j[a * m + a] = 1.0),
            Diffeomorphism::Affine { matrix, .. } => j.copy_from_slice(matrix),
            Diffeomorphism::Sine { epsilon, omega } => {
                for a in 0..m {
                    let b = (a + 1) % m;
                    j[a * m + a] = 1.0;
                    j[a * m + b] += epsilon * omega * (omega * x[b]).cos();
                }
            }
        }
        j
    }

    /// `∂_k∂_l φᵃ` at `[(a*m + k)*m + l]`.
    pub fn second_derivatives(&self, x: &[f64]) -> Vec<f64> {
        let m = x.len();
        let mut d = vec![0.0; m * m * m];
        if let Diffeomorphism::Sine { epsilon, omega } = self {
            for a in 0..m {
                let b = (a + 1) % m;
                d[(a * m + b) * m + b] = -epsilon * omega * omega * (omega * x[b]).sin();
            }
        }
        d
    }

    fn check(&self, m: usize) -> Result<()> {
        if let Diffeomorphism::Affine { matrix, offset } = self {
            if matrix.len() != m * m || offset.len() != m {
                return Err(LabError::Dimension(format!("affine map must be {m} × {m} plus offset")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub samples: usize,
    pub max_discrepancy: f64,
    /// Largest `|Γ(φ*g)|` from the transformation law, for scale.
    pub max_symbol: f64,
}

fn invert(j: &[f64], m: usize) -> Result<Vec<f64>> {
    let mat = DMatrix::from_row_slice(m, m, j);
    let det = mat.determinant();
    if !(det.abs() > 1e-12) {
        return Err(LabError::InvalidArgument(format!("dφ is not invertible (det = {det})")));
    }
    let inv = mat.try_inverse().expect("non-zero determinant");
    Ok((0..m * m).map(|ab| inv[(ab / m, ab % m)]).collect())
}

/// `(φ*g)_kl(x) = Jᵃ_k Jᵇ_l g_ab(φ(x))`.
fn pulled_back_metric(phi: &Diffeomorphism, metric: &MetricSpec, x: &[f64]) -> Result<Vec<f64>> {
    let m = x.len();
    let y = phi.apply(x);
    let g = geometry_at(metric, &y)?.metric;
    let j = phi.jacobian(x);
    let mut out = vec![0.0; m * m];
    for k in 0..m {
        for l in 0..m {
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += j[a * m + k] * j[b * m + l] * g[a * m + b];
                }
            }
            out[k * m + l] = s;
        }
    }
    Ok(out)
}

/// `Γⁱ_kl(φ*g)(x)` from the transformation law.
pub fn transformed_christoffel(phi: &Diffeomorphism, metric: &MetricSpec, x: &[f64]) -> Result<Vec<f64>> {
    let m = x.len();
    let geo = geometry_at(metric, &phi.apply(x))?;
    let j = phi.jacobian(x);
    let jinv = invert(&j, m)?;
    let d2 = phi.second_derivatives(x);
    let mut out = vec![0.0; m * m * m];
    for k in 0..m {
        for l in 0..m {
            let inner: Vec<f64> = (0..m)
                .map(|c| {
                    let mut s = d2[(c * m + k) * m + l];
                    for a in 0..m {
                        for b in 0..m {
                            s += geo.gamma(c, a, b) * j[a * m + k] * j[b * m + l];
                        }
                    }
                    s
                })
                .collect();
            for i in 0..m {
                out[(i * m + k) * m + l] = (0..m).map(|c| jinv[i * m + c] * inner[c]).sum();
            }
        }
    }
    Ok(out)
}

/// `Γⁱ_kl = ½ gⁱʲ(∂_k g_jl + ∂_l g_jk − ∂_j g_kl)` with central differences of
/// step `step` on the pulled-back metric.
pub fn fd_pullback_christoffel(phi: &Diffeomorphism, metric: &MetricSpec, x: &[f64], step: f64) -> Result<Vec<f64>> {
    let m = x.len();
    let g = pulled_back_metric(phi, metric, x)?;
    let ginv = invert(&g, m)?;
    let mut dg = vec![0.0; m * m * m];
    for a in 0..m {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[a] += step;
        xm[a] -= step;
        let (gp, gm) = (pulled_back_metric(phi, metric, &xp)?, pulled_back_metric(phi, metric, &xm)?);
        for kl in 0..m * m {
            dg[a * m * m + kl] = (gp[kl] - gm[kl]) / (2.0 * step);
        }
    }
    let d = |a: usize, k: usize, l: usize| dg[(a * m + k) * m + l];
    let mut out = vec![0.0; m * m * m];
    for i in 0..m {
        for k in 0..m {
            for l in 0..m {
                out[(i * m + k) * m + l] = 0.5
                    * (0..m)
                        .map(|j| ginv[i * m + j] * (d(k, j, l) + d(l, j, k) - d(j, k, l)))
                        .sum::<f64>();
            }
        }
    }
    Ok(out)
}

/// Largest `|Γ_FD(φ*g) − Γ_law(φ*g)|` over `samples`.
pub fn christoffel_pullback_check(
    phi: &Diffeomorphism,
    metric: &MetricSpec,
    samples: &[Vec<f64>],
    step: f64,
) -> Result<PullbackReport> {
    let m = metric.m();
    phi.check(m)?;
    if !(step > 0.0) {
        return Err(LabError::InvalidArgument(format!("step must be > 0, got {step}")));
    }
    let mut rep = PullbackReport {
        samples: samples.len(),
        max_discrepancy: 0.0,
        max_symbol: 0.0,
    };
    for x in samples {
        if x.len() != m {
            return Err(LabError::Dimension(format!("sample {x:?} is not in dimension {m}")));
        }
        let law = transformed_christoffel(phi, metric, x)?;
        let fd = fd_pullback_christoffel(phi, metric, x, step)?;
        for (a, b) in law.iter().zip(&fd) {
            rep.max_discrepancy = rep.max_discrepancy.max((a - b).abs());
            rep.max_symbol = rep.max_symbol.max(a.abs());
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpacetimeGrid;

    #[test]
    fn singular_affine_map_is_rejected() {
        let g = MetricSpec::minkowski(&SpacetimeGrid::unit(2, 9, 1.0, 0.5).unwrap());
        let phi = Diffeomorphism::Affine {
            matrix: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            offset: vec![0.0; 3],
        };
        assert!(christoffel_pullback_check(&phi, &g, &[vec![0.5, 0.5, 0.5]], 1e-3).is_err());
    }

    #[test]
    fn sine_derivatives_match_differences() {
        let phi = Diffeomorphism::Sine {
            epsilon: 0.05,
            omega: 3.0,
        };
        let x = [0.3, 0.6, 0.2];
        let j = phi.jacobian(&x);
        let eps = 1e-6;
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += eps;
            xm[k] -= eps;
            let (fp, fm) = (phi.apply(&xp), phi.apply(&xm));
            for a in 0..3 {
                assert!((j[a * 3 + k] - (fp[a] - fm[a]) / (2.0 * eps)).abs() < 1e-8);
            }
        }
    }
}
