use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Standard mollifier `H(s) = A·exp(1/(z² − 1))`, `z = (s − s₀)/w`, supported
/// on `|s − s₀| < w`. Its maximum `A/e` sits at `s₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
}

impl BumpProfile {
    pub fn new(amplitude: f64, width: f64, center: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(LabError::InvalidArgument(format!(
                "bump amplitude must be ≥ 0, got {amplitude}"
            )));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(LabError::InvalidArgument(format!(
                "bump width must be > 0, got {width}"
            )));
        }
        Ok(BumpProfile {
            amplitude,
            width,
            center,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Peak value `A·e⁻¹`.
    pub fn peak(&self) -> f64 {
        self.amplitude * (-1.0f64).exp()
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    /// `(H, H', H'')` at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let z = (s - self.center) / self.width;
        if self.amplitude == 0.0 || z.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let q = z * z - 1.0;
        let e = (1.0 / q).exp();
        if e == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let q2 = q * q;
        let dz = e * (-2.0 * z / q2);
        let dzz = e * (6.0 * z.powi(4) - 2.0) / (q2 * q2);
        let a = self.amplitude;
        let w = self.width;
        (a * e, a * dz / w, a * dzz / (w * w))
    }

    /// Closed support `[s₀ − w, s₀ + w]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_support() {
        let b = BumpProfile::new(2.0, 0.5, 1.0).unwrap();
        assert!((b.value(1.0) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert_eq!(b.value(1.5), 0.0);
        assert_eq!(b.value(0.4), 0.0);
        assert!(b.value(1.49) > 0.0);
        let (_, d1, d2) = b.eval(1.0);
        assert_eq!(d1, 0.0);
        assert!((d2 - 2.0 * (-2.0 / std::f64::consts::E) / 0.25).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = BumpProfile::new(1.3, 0.7, -0.2).unwrap();
        let eps = 1e-5;
        for &s in &[-0.8, -0.5, -0.2, 0.1, 0.3, 0.45] {
            let (_, d1, d2) = b.eval(s);
            let fd1 = (b.value(s + eps) - b.value(s - eps)) / (2.0 * eps);
            let fd2 = (b.value(s + eps) - 2.0 * b.value(s) + b.value(s - eps)) / (eps * eps);
            assert!((d1 - fd1).abs() < 1e-7 * (1.0 + d1.abs()), "d1 at {s}");
            assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "d2 at {s}");
        }
    }

    #[test]
    fn no_nan_near_support_edge() {
        let b = BumpProfile::new(1.0, 1.0, 0.0).unwrap();
        for k in 0..200 {
            let s = 1.0 - 10f64.powi(-k / 10);
            let (v, d1, d2) = b.eval(s);
            assert!(v.is_finite() && d1.is_finite() && d2.is_finite());
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(BumpProfile::new(-1.0, 1.0, 0.0).is_err());
        assert!(BumpProfile::new(1.0, 0.0, 0.0).is_err());
    }
}
