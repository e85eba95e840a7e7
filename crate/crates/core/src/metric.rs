//! The metric family `g = c(t, x)·(−dt² + a(x) δ_ij dxⁱ dxʲ)`.
//!
//! `c` is a positive constant times a product of conformal factors raised to
//! powers; `a` is a static spatial factor. Minkowski is `c ≡ a ≡ 1`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conformal::manufactured::ManufacturedFactor;
use crate::conformal::plane_wave::PlaneWaveFactor;
use crate::error::{LabError, Result};
use crate::field::{for_each_point, ScalarField};
use crate::function::{Jet, Polynomial2, SpacetimeFunction};
use crate::grid::SpacetimeGrid;

/// Where in time a coefficient is evaluated: at level `k` or at `t_{k+1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeLevel {
    Node(usize),
    Half(usize),
}

impl TimeLevel {
    pub fn time(&self, grid: &SpacetimeGrid) -> f64 {
        match *self {
            TimeLevel::Node(k) => grid.time(k),
            TimeLevel::Half(k) => grid.time(k) + 0.5 * grid.dt(),
        }
    }
}

/// Static spatial factor `a(x) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StaticBase {
    Flat,
    Constant { value: f64 },
    /// `1 + amplitude·exp(−‖x − center‖²/scale)`.
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        scale: f64,
    },
}

impl StaticBase {
    pub fn is_flat(&self) -> bool {
        matches!(self, StaticBase::Flat)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            StaticBase::Flat => 1.0,
            StaticBase::Constant { value } => *value,
            StaticBase::Gaussian {
                amplitude,
                center,
                scale,
            } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                1.0 + amplitude * (-r2 / scale).exp()
            }
        }
    }

    /// Spatial jet of `a` (gradient length `n`, Hessian `n × n`).
    pub fn jet(&self, x: &[f64]) -> Jet {
        let n = x.len();
        match self {
            StaticBase::Flat => Jet::constant(n, 1.0),
            StaticBase::Constant { value } => Jet::constant(n, *value),
            StaticBase::Gaussian {
                amplitude,
                center,
                scale,
            } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let r2: f64 = d.iter().map(|v| v * v).sum();
                let e = amplitude * (-r2 / scale).exp();
                let grad = d.iter().map(|di| -2.0 * di / scale * e).collect();
                let mut hess = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        hess[i * n + j] = e * (4.0 * d[i] * d[j] / (scale * scale) - 2.0 * delta / scale);
                    }
                }
                Jet {
                    value: 1.0 + e,
                    grad,
                    hess,
                }
            }
        }
    }

    fn descriptor(&self) -> String {
        match self {
            StaticBase::Flat => "flat".into(),
            StaticBase::Constant { value } => format!("a={value}"),
            StaticBase::Gaussian {
                amplitude,
                center,
                scale,
            } => format!("gauss(A={amplitude},c={center:?},s={scale})"),
        }
    }
}

/// A positive conformal factor `f`. Analytic variants carry exact derivatives;
/// the manufactured variant is sampled on a grid.
#[derive(Debug, Clone)]
pub enum Factor {
    PlaneWave(PlaneWaveFactor),
    Polynomial(Polynomial2),
    Manufactured(Arc<ManufacturedFactor>),
    /// Positive values on a grid; half time levels interpolate linearly.
    Sampled(Arc<ScalarField>),
}

/// Grid value of a sampled quantity at a node or half time level.
pub fn sampled_value(field: &ScalarField, level: TimeLevel, node: usize) -> f64 {
    match level {
        TimeLevel::Node(k) => field.get(k, node),
        TimeLevel::Half(k) => 0.5 * (field.get(k, node) + field.get(k + 1, node)),
    }
}

impl Factor {
    pub fn analytic(&self) -> Option<&dyn SpacetimeFunction> {
        match self {
            Factor::PlaneWave(f) => Some(f),
            Factor::Polynomial(f) => Some(f),
            Factor::Manufactured(_) | Factor::Sampled(_) => None,
        }
    }

    /// True when the factor is identically one.
    pub fn is_identity(&self) -> bool {
        match self {
            Factor::PlaneWave(f) => f.profile().is_zero(),
            Factor::Polynomial(p) => p.is_constant() && p.constant == 1.0,
            Factor::Manufactured(m) => m.is_identity(),
            Factor::Sampled(f) => f.values().iter().all(|&v| v == 1.0),
        }
    }

    /// `f` at `(level, node)`; `p` must be the matching point `(t, x)`.
    pub fn value_at(&self, p: &[f64], level: TimeLevel, node: usize) -> f64 {
        match self {
            Factor::PlaneWave(f) => f.value(p),
            Factor::Polynomial(f) => f.value(p),
            Factor::Manufactured(m) => m.value_at(level, node),
            Factor::Sampled(f) => sampled_value(f, level, node),
        }
    }

    pub fn grid(&self) -> Option<&SpacetimeGrid> {
        match self {
            Factor::Manufactured(m) => Some(m.grid()),
            Factor::Sampled(f) => Some(f.grid()),
            _ => None,
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Factor::PlaneWave(f) => format!(
                "plane(θ={:?},x0={:?},t0={},A={},w={})",
                f.theta(),
                f.x0(),
                f.t0(),
                f.profile().amplitude,
                f.profile().width
            ),
            Factor::Polynomial(p) => format!("poly({},{:?},{:?})", p.constant, p.linear, p.quadratic),
            Factor::Manufactured(m) => m.descriptor(),
            Factor::Sampled(f) => format!("sampled(max={})", f.max_abs()),
        }
    }
}

impl From<PlaneWaveFactor> for Factor {
    fn from(f: PlaneWaveFactor) -> Self {
        Factor::PlaneWave(f)
    }
}

impl From<Polynomial2> for Factor {
    fn from(f: Polynomial2) -> Self {
        Factor::Polynomial(f)
    }
}

#[derive(Debug, Clone)]
pub struct PoweredFactor {
    pub factor: Factor,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Minkowski,
    ConformalMinkowski,
    ConformalStaticBase,
}

#[derive(Debug, Clone)]
pub struct MetricSpec {
    grid: SpacetimeGrid,
    base: StaticBase,
    scale: f64,
    factors: Vec<PoweredFactor>,
}

impl MetricSpec {
    /// `η = diag(−1, 1, …, 1)`.
    pub fn minkowski(grid: &SpacetimeGrid) -> Self {
        MetricSpec {
            grid: grid.clone(),
            base: StaticBase::Flat,
            scale: 1.0,
            factors: Vec::new(),
        }
    }

    /// `−dt² + a(x) δ dx²`; checks `a > 0` at every node.
    pub fn static_base(grid: &SpacetimeGrid, base: StaticBase) -> Result<Self> {
        let metric = MetricSpec {
            grid: grid.clone(),
            base,
            scale: 1.0,
            factors: Vec::new(),
        };
        metric.check_positive()?;
        Ok(metric)
    }

    /// Multiplies `c` by a positive constant.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(LabError::NonPositive {
                what: "conformal constant",
                value: s,
                node: 0,
            });
        }
        let mut out = self.clone();
        out.scale *= s;
        Ok(out)
    }

    /// Appends `f^power` to `c` after checking `f > 0` on the grid.
    pub fn with_factor(&self, factor: Factor, power: f64) -> Result<Self> {
        if let Some(g) = factor.grid() {
            if g != &self.grid {
                return Err(LabError::GridMismatch("factor sampled on a different grid".into()));
            }
        }
        let mut out = self.clone();
        out.factors.push(PoweredFactor { factor, power });
        out.check_positive()?;
        Ok(out)
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn base(&self) -> &StaticBase {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn factors(&self) -> &[PoweredFactor] {
        &self.factors
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn kind(&self) -> MetricKind {
        if !self.base.is_flat() {
            MetricKind::ConformalStaticBase
        } else if self.scale == 1.0 && self.factors.is_empty() {
            MetricKind::Minkowski
        } else {
            MetricKind::ConformalMinkowski
        }
    }

    /// True when every factor has analytic derivatives.
    pub fn is_analytic(&self) -> bool {
        self.factors.iter().all(|f| f.factor.analytic().is_some())
    }

    /// Metric with the same base and grid but no conformal factors.
    pub fn base_metric(&self) -> MetricSpec {
        MetricSpec {
            grid: self.grid.clone(),
            base: self.base.clone(),
            scale: 1.0,
            factors: Vec::new(),
        }
    }

    /// Conformal factor `c` at `(level, node)`; `p` is the matching point.
    pub fn c_at(&self, p: &[f64], level: TimeLevel, node: usize) -> f64 {
        let mut c = self.scale;
        for pf in &self.factors {
            let v = pf.factor.value_at(p, level, node);
            c *= if pf.power == 1.0 { v } else { v.powf(pf.power) };
        }
        c
    }

    pub fn c_node(&self, k: usize, node: usize) -> f64 {
        let p = self.grid.point(k, node);
        self.c_at(&p, TimeLevel::Node(k), node)
    }

    pub fn a_at(&self, x: &[f64]) -> f64 {
        self.base.value(x)
    }

    /// Analytic jet of `h = ½ ln c` at a space-time point, when available.
    pub fn log_half_c_jet(&self, p: &[f64]) -> Option<Jet> {
        let m = self.m();
        let mut out = Jet::constant(m, 0.5 * self.scale.ln());
        for pf in &self.factors {
            let f = pf.factor.analytic()?;
            out.add_assign(&f.jet(p).ln().scale(0.5 * pf.power));
        }
        Some(out)
    }

    /// Covariant components `g_ab` at a point (row-major `m × m`) given `c` there.
    pub fn metric_components(&self, c: f64, x: &[f64]) -> Vec<f64> {
        let m = self.m();
        let a = self.a_at(x);
        let mut g = vec![0.0; m * m];
        g[0] = -c;
        for i in 1..m {
            g[i * m + i] = c * a;
        }
        g
    }

    fn check_positive(&self) -> Result<()> {
        let mut failure = None;
        let spatial = self.grid.spatial_len();
        for_each_point(&self.grid, |idx, p| {
            if failure.is_some() {
                return;
            }
            let a = self.base.value(&p[1..]);
            if !(a > 0.0) {
                failure = Some(("a(x)", a, idx));
                return;
            }
            let (k, node) = (idx / spatial, idx % spatial);
            for pf in &self.factors {
                let v = pf.factor.value_at(p, TimeLevel::Node(k), node);
                if !(v > 0.0) {
                    failure = Some(("conformal factor", v, idx));
                    return;
                }
            }
        });
        match failure {
            Some((what, value, node)) => Err(LabError::NonPositive { what, value, node }),
            None => Ok(()),
        }
    }

    /// Largest `g(∂_t, ∂_t) = −c` over the grid; negative for every valid metric.
    pub fn max_g_tt(&self) -> f64 {
        let spatial = self.grid.spatial_len();
        let mut worst = f64::NEG_INFINITY;
        for_each_point(&self.grid, |idx, p| {
            let c = self.c_at(p, TimeLevel::Node(idx / spatial), idx % spatial);
            worst = worst.max(-c);
        });
        worst
    }

    /// Identifier stable across runs, used in DN-matrix metadata.
    pub fn descriptor(&self) -> String {
        let mut s = format!("{:?}[{}; scale={}", self.kind(), self.base.descriptor(), self.scale);
        for pf in &self.factors {
            s.push_str(&format!("; ({})^{}", pf.factor.descriptor(), pf.power));
        }
        s.push(']');
        s
    }
}
