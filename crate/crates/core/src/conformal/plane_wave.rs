use serde::{Deserialize, Serialize};

use super::bump::BumpProfile;
use crate::error::{LabError, Result};
use crate::function::{Jet, SpacetimeFunction};

/// `f(t, x) = 1 + H((x − x₀)·θ − (t − t₀))`, constant along the lightlike
/// hyperplanes `(x − x₀)·θ − (t − t₀) = const`, hence `□_η f = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveFactor {
    theta: Vec<f64>,
    x0: Vec<f64>,
    t0: f64,
    profile: BumpProfile,
}

impl PlaneWaveFactor {
    pub fn new(theta: Vec<f64>, x0: Vec<f64>, t0: f64, profile: BumpProfile) -> Result<Self> {
        if theta.len() != x0.len() || theta.is_empty() {
            return Err(LabError::Dimension(format!(
                "θ has {} components, x₀ has {}",
                theta.len(),
                x0.len()
            )));
        }
        let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidArgument(format!(
                "θ must be a Euclidean unit vector, ‖θ‖ = {norm}"
            )));
        }
        Ok(PlaneWaveFactor {
            theta,
            x0,
            t0,
            profile,
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    /// Same factor with `(x₀, t₀)` moved.
    pub fn translated(&self, dx: &[f64], dt: f64) -> Self {
        PlaneWaveFactor {
            x0: self.x0.iter().zip(dx).map(|(a, b)| a + b).collect(),
            t0: self.t0 + dt,
            ..self.clone()
        }
    }

    pub fn with_profile(&self, profile: BumpProfile) -> Self {
        PlaneWaveFactor {
            profile,
            ..self.clone()
        }
    }

    /// Signed hyperplane coordinate `s = (x − x₀)·θ − (t − t₀)`.
    pub fn phase(&self, p: &[f64]) -> f64 {
        let mut s = -(p[0] - self.t0);
        for (i, th) in self.theta.iter().enumerate() {
            s += (p[i + 1] - self.x0[i]) * th;
        }
        s
    }

    /// Largest value `1 + A/e`.
    pub fn max_value(&self) -> f64 {
        1.0 + self.profile.peak()
    }
}

impl SpacetimeFunction for PlaneWaveFactor {
    fn dim(&self) -> usize {
        self.theta.len() + 1
    }

    fn value(&self, p: &[f64]) -> f64 {
        1.0 + self.profile.value(self.phase(p))
    }

    fn jet(&self, p: &[f64]) -> Jet {
        let m = self.dim();
        let (h, h1, h2) = self.profile.eval(self.phase(p));
        // ∂s/∂t = −1, ∂s/∂xⁱ = θᵢ
        let mut k = Vec::with_capacity(m);
        k.push(-1.0);
        k.extend_from_slice(&self.theta);
        let grad = k.iter().map(|ka| h1 * ka).collect();
        let mut hess = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                hess[a * m + b] = h2 * k[a] * k[b];
            }
        }
        Jet {
            value: 1.0 + h,
            grad,
            hess,
        }
    }
}
