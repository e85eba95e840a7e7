//! Curvature of `e^{2h}·(−dt² + a(x) δ dx²)` at a single point, from the jets
//! of `h` and `a`.
//!
//! The static base is a product of a time line with the conformally flat
//! spatial metric `a δ`; its Christoffel symbols and Ricci tensor are closed
//! form in `σ = ½ ln a`. The conformal change then uses
//!
//! ```text
//! Γ^i_kl(e^{2h}g) = Γ^i_kl(g) + ∂_k h δ^i_l + ∂_l h δ^i_k − g^{ia} ∂_a h g_kl
//! R_ab(e^{2h}g)   = R_ab(g) − (m−2)(∇_a∇_b h − ∂_a h ∂_b h) − (Δ_g h + (m−2)|dh|²_g) g_ab
//! ```
//!
//! with `Δ_g h = g^{ab}∇_a∇_b h` and `∇` the base connection.

use crate::error::{LabError, Result};
use crate::function::Jet;

/// Metric, connection and curvature at one point. Matrices are row-major
/// `m × m`; `christoffel[(i*m + k)*m + l] = Γ^i_{kl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub m: usize,
    pub metric: Vec<f64>,
    pub inverse: Vec<f64>,
    pub christoffel: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    /// `None` when `m = 2`.
    pub schouten: Option<Vec<f64>>,
}

impl PointGeometry {
    pub fn gamma(&self, i: usize, k: usize, l: usize) -> f64 {
        self.christoffel[(i * self.m + k) * self.m + l]
    }

    pub fn schouten(&self) -> Result<&[f64]> {
        self.schouten
            .as_deref()
            .ok_or_else(|| LabError::Dimension("Schouten tensor needs m ≥ 3".into()))
    }
}

/// Base quantities of `g₀ = −dt² + a δ` at a point.
struct StaticGeometry {
    metric: Vec<f64>,
    inverse: Vec<f64>,
    christoffel: Vec<f64>,
    ricci: Vec<f64>,
}

fn static_geometry(m: usize, a: &Jet) -> StaticGeometry {
    let n = m - 1;
    let mut metric = vec![0.0; m * m];
    let mut inverse = vec![0.0; m * m];
    metric[0] = -1.0;
    inverse[0] = -1.0;
    for i in 1..m {
        metric[i * m + i] = a.value;
        inverse[i * m + i] = 1.0 / a.value;
    }
    // Γ^i_jk = (a_j δ_ik + a_k δ_ij − a_i δ_jk)/(2a), spatial indices only
    let mut christoffel = vec![0.0; m * m * m];
    let inv2a = 0.5 / a.value;
    for i in 1..m {
        for j in 1..m {
            for k in 1..m {
                let mut v = 0.0;
                if i == k {
                    v += a.grad[j - 1];
                }
                if i == j {
                    v += a.grad[k - 1];
                }
                if j == k {
                    v -= a.grad[i - 1];
                }
                christoffel[(i * m + j) * m + k] = v * inv2a;
            }
        }
    }
    // spatial Ricci of e^{2σ}δ in dimension n
    let sigma = a.ln().scale(0.5);
    let nf = n as f64;
    let lap: f64 = (0..n).map(|i| sigma.hess[i * n + i]).sum();
    let grad2: f64 = sigma.grad.iter().map(|v| v * v).sum();
    let mut ricci = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let mut v = -(nf - 2.0) * (sigma.hess[i * n + j] - sigma.grad[i] * sigma.grad[j]);
            if i == j {
                v -= lap + (nf - 2.0) * grad2;
            }
            ricci[(i + 1) * m + (j + 1)] = v;
        }
    }
    StaticGeometry {
        metric,
        inverse,
        christoffel,
        ricci,
    }
}

/// Geometry of `e^{2h}(−dt² + a δ dx²)` given the space-time jet of `h`
/// (length `m`) and the spatial jet of `a` (length `n = m − 1`).
pub fn conformal_static_geometry(h: &Jet, a: &Jet) -> PointGeometry {
    let m = h.dim();
    let base = static_geometry(m, a);
    let mf = m as f64;
    let e2h = (2.0 * h.value).exp();
    let dh = &h.grad;

    let mut christoffel = base.christoffel.clone();
    let mut raised = vec![0.0; m];
    for i in 0..m {
        raised[i] = (0..m).map(|b| base.inverse[i * m + b] * dh[b]).sum();
    }
    for i in 0..m {
        for k in 0..m {
            for l in 0..m {
                let mut v = -raised[i] * base.metric[k * m + l];
                if i == l {
                    v += dh[k];
                }
                if i == k {
                    v += dh[l];
                }
                christoffel[(i * m + k) * m + l] += v;
            }
        }
    }

    // covariant Hessian of h w.r.t. the base
    let mut cov_hess = vec![0.0; m * m];
    for a_ in 0..m {
        for b in 0..m {
            let conn: f64 = (0..m)
                .map(|c| base.christoffel[(c * m + a_) * m + b] * dh[c])
                .sum();
            cov_hess[a_ * m + b] = h.hess[a_ * m + b] - conn;
        }
    }
    let lap: f64 = (0..m * m).map(|ab| base.inverse[ab] * cov_hess[ab]).sum();
    let q: f64 = (0..m).map(|a_| raised[a_] * dh[a_]).sum();

    let mut ricci = base.ricci.clone();
    for a_ in 0..m {
        for b in 0..m {
            ricci[a_ * m + b] += -(mf - 2.0) * (cov_hess[a_ * m + b] - dh[a_] * dh[b])
                - (lap + (mf - 2.0) * q) * base.metric[a_ * m + b];
        }
    }
    let metric: Vec<f64> = base.metric.iter().map(|g| g * e2h).collect();
    let inverse: Vec<f64> = base.inverse.iter().map(|g| g / e2h).collect();
    let scalar: f64 = (0..m * m).map(|ab| inverse[ab] * ricci[ab]).sum();
    let schouten = if m > 2 {
        Some(
            (0..m * m)
                .map(|ab| (ricci[ab] - scalar * metric[ab] / (2.0 * (mf - 1.0))) / (mf - 2.0))
                .collect(),
        )
    } else {
        None
    };
    PointGeometry {
        m,
        metric,
        inverse,
        christoffel,
        ricci,
        scalar,
        schouten,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_is_flat() {
        let g = conformal_static_geometry(&Jet::constant(3, 0.0), &Jet::constant(2, 1.0));
        assert!(g.christoffel.iter().all(|&v| v == 0.0));
        assert!(g.ricci.iter().all(|&v| v == 0.0));
        assert_eq!(g.scalar, 0.0);
        assert!(g.schouten.unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_h_christoffel() {
        // h = x¹ on η: Γ¹₀₀ = −g^{11} ∂₁h g₀₀ = 1
        let mut h = Jet::constant(3, 0.0);
        h.grad[1] = 1.0;
        let g = conformal_static_geometry(&h, &Jet::constant(2, 1.0));
        assert_eq!(g.gamma(1, 0, 0), 1.0);
        assert_eq!(g.gamma(0, 0, 1), 1.0);
        assert_eq!(g.gamma(2, 0, 0), 0.0);
    }

    #[test]
    fn linear_h_scalar_curvature_is_closed_form() {
        // R(e^{2x¹}η) = −(m−1)(m−2) q(dh) e^{−2h} with q = |dh|² = 1 at x¹ = 0
        for m in 3..=4 {
            let mut h = Jet::constant(m, 0.0);
            h.grad[1] = 1.0;
            let g = conformal_static_geometry(&h, &Jet::constant(m - 1, 1.0));
            let mf = m as f64;
            assert!((g.scalar + (mf - 1.0) * (mf - 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn round_sphere_like_base_has_expected_gauss_curvature() {
        // a = 4/(1+|x|²)² is the round unit sphere in stereographic coordinates:
        // spatial scalar curvature 2 (n = 2); the product with a time line keeps R = 2.
        let x = [0.3f64, -0.2];
        let r2 = x[0] * x[0] + x[1] * x[1];
        let denom = 1.0 + r2;
        let value = 4.0 / (denom * denom);
        // ∂_i a = −16 x_i/(1+r²)³, ∂_ij a = −16 δ_ij/(1+r²)³ + 96 x_i x_j/(1+r²)⁴
        let grad = vec![-16.0 * x[0] / denom.powi(3), -16.0 * x[1] / denom.powi(3)];
        let mut hess = vec![0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                let d = if i == j { 1.0 } else { 0.0 };
                hess[i * 2 + j] = -16.0 * d / denom.powi(3) + 96.0 * x[i] * x[j] / denom.powi(4);
            }
        }
        let a = Jet { value, grad, hess };
        let g = conformal_static_geometry(&Jet::constant(3, 0.0), &a);
        assert!((g.scalar - 2.0).abs() < 1e-12, "R = {}", g.scalar);
    }

    #[test]
    fn two_dimensional_has_no_schouten() {
        let g = conformal_static_geometry(&Jet::constant(2, 0.0), &Jet::constant(1, 1.0));
        assert!(g.schouten().is_err());
    }
}
