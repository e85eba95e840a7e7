//! Analytic space-time functions with exact first and second derivatives.

use serde::{Deserialize, Serialize};

/// Value, gradient and Hessian of a function at one point. Gradient has length
/// `m`; the Hessian is row-major `m × m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Jet {
    pub fn constant(m: usize, value: f64) -> Self {
        Jet {
            value,
            grad: vec![0.0; m],
            hess: vec![0.0; m * m],
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Jet of `ln(self)`; requires a positive value.
    pub fn ln(&self) -> Jet {
        let m = self.dim();
        let v = self.value;
        let grad: Vec<f64> = self.grad.iter().map(|g| g / v).collect();
        let mut hess = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                hess[a * m + b] = self.hess[a * m + b] / v - grad[a] * grad[b];
            }
        }
        Jet {
            value: v.ln(),
            grad,
            hess,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|g| g * s).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Jet) {
        self.value += other.value;
        for (a, b) in self.grad.iter_mut().zip(&other.grad) {
            *a += b;
        }
        for (a, b) in self.hess.iter_mut().zip(&other.hess) {
            *a += b;
        }
    }
}

pub trait SpacetimeFunction: Send + Sync + std::fmt::Debug {
    /// Space-time dimension `m` of the argument `[t, x¹, …, xⁿ]`.
    fn dim(&self) -> usize;

    fn value(&self, p: &[f64]) -> f64;

    fn jet(&self, p: &[f64]) -> Jet;
}

/// `c₀ + b·p + ½ pᵀ A p` on `ℝᵐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial2 {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Symmetric row-major `m × m`.
    pub quadratic: Vec<f64>,
}

impl Polynomial2 {
    pub fn new(constant: f64, linear: Vec<f64>, quadratic: Vec<f64>) -> Self {
        let m = linear.len();
        assert_eq!(quadratic.len(), m * m, "quadratic part must be m × m");
        let mut q = quadratic;
        for a in 0..m {
            for b in a + 1..m {
                let s = 0.5 * (q[a * m + b] + q[b * m + a]);
                q[a * m + b] = s;
                q[b * m + a] = s;
            }
        }
        Polynomial2 {
            constant,
            linear,
            quadratic: q,
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Self::new(c, vec![0.0; m], vec![0.0; m * m])
    }

    /// `c + slope·p[axis]`.
    pub fn affine(m: usize, c: f64, axis: usize, slope: f64) -> Self {
        let mut lin = vec![0.0; m];
        lin[axis] = slope;
        Self::new(c, lin, vec![0.0; m * m])
    }

    /// `c + k·‖x‖²` (spatial radius only; time-independent).
    pub fn radial(m: usize, c: f64, k: f64) -> Self {
        let mut q = vec![0.0; m * m];
        for a in 1..m {
            q[a * m + a] = 2.0 * k;
        }
        Self::new(c, vec![0.0; m], q)
    }

    pub fn is_constant(&self) -> bool {
        self.linear.iter().chain(&self.quadratic).all(|&v| v == 0.0)
    }
}

impl SpacetimeFunction for Polynomial2 {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, p: &[f64]) -> f64 {
        let m = self.dim();
        let mut v = self.constant;
        for a in 0..m {
            v += self.linear[a] * p[a];
            for b in 0..m {
                v += 0.5 * self.quadratic[a * m + b] * p[a] * p[b];
            }
        }
        v
    }

    fn jet(&self, p: &[f64]) -> Jet {
        let m = self.dim();
        let grad = (0..m)
            .map(|a| self.linear[a] + (0..m).map(|b| self.quadratic[a * m + b] * p[b]).sum::<f64>())
            .collect();
        Jet {
            value: self.value(p),
            grad,
            hess: self.quadratic.clone(),
        }
    }
}
