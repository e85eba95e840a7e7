//! First-order system for the 1-jet of a conformal diffeomorphism `φ` with
//! `φ*g = e^{2h} g`, transported along a path `γ`:
//!
//! ```text
//! ∂_s Xʲ_l = γ̇ᵏ [ Xʲ_c (Γᶜ_kl(γ) + 𝒩ᶜ_kl(Y)) − Γʲ_ab(Z) Xᵃ_k Xᵇ_l ]
//! ∂_s Y_j  = γ̇ᵏ [ ℳ_kj(Y) + Γᶜ_kj(γ) Y_c + P_kj(γ) − Xᵇ_k Xᶜ_j P_bc(Z) ]
//! ∂_s Zʲ   = γ̇ᵏ Xʲ_k
//! 𝒩ᶜ_kl = δᶜ_l Y_k + δᶜ_k Y_l − gᶜᵃ Y_a g_kl,   ℳ_kl = Y_k Y_l − ½ g(Y, Y) g_kl
//! ```
//!
//! `X = dφ∘γ`, `Y = dh∘γ`, `Z = φ∘γ`. Identity data `(I, 0, γ)` is a stationary
//! orbit for every metric.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::fmt17;
use crate::geometry::{conformal_static_geometry, PointGeometry};
use crate::grid::SpacetimeGrid;
use crate::metric::MetricSpec;

/// Norm above which integration aborts.
pub const BLOW_UP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetState {
    /// `Xʲ_l` row-major, `x[j*m + l]`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl JetState {
    /// `(I, 0, p)`.
    pub fn identity(p: &[f64]) -> Self {
        let m = p.len();
        let mut x = vec![0.0; m * m];
        for j in 0..m {
            x[j * m + j] = 1.0;
        }
        JetState {
            x,
            y: vec![0.0; m],
            z: p.to_vec(),
        }
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn norm_inf(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .fold(0.0, |acc: f64, v| if v.is_nan() { f64::NAN } else { acc.max(v.abs()) })
    }

    /// `‖(X, Y, Z) − (I, 0, p)‖_∞`.
    pub fn deviation_from_identity(&self, p: &[f64]) -> f64 {
        self.axpy(-1.0, &JetState::identity(p)).norm_inf()
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &JetState) -> JetState {
        let comb = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        JetState {
            x: comb(&self.x, &other.x),
            y: comb(&self.y, &other.y),
            z: comb(&self.z, &other.z),
        }
    }

    fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).chain(&self.z).all(|v| v.is_finite())
    }
}

/// Smooth curve `γ: [0, 1] → M̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// `start + s (end − start)`.
    Line { start: Vec<f64>, end: Vec<f64> },
    /// `start + s (end − start) + sin(πs)·bend`.
    Bent {
        start: Vec<f64>,
        end: Vec<f64>,
        bend: Vec<f64>,
    },
}

impl PathSpec {
    pub fn start(&self) -> &[f64] {
        match self {
            PathSpec::Line { start, .. } | PathSpec::Bent { start, .. } => start,
        }
    }

    pub fn m(&self) -> usize {
        self.start().len()
    }

    pub fn point(&self, s: f64) -> Vec<f64> {
        match self {
            PathSpec::Line { start, end } => start.iter().zip(end).map(|(a, b)| a + s * (b - a)).collect(),
            PathSpec::Bent { start, end, bend } => {
                let w = (std::f64::consts::PI * s).sin();
                start
                    .iter()
                    .zip(end)
                    .zip(bend)
                    .map(|((a, b), c)| a + s * (b - a) + w * c)
                    .collect()
            }
        }
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        match self {
            PathSpec::Line { start, end } => start.iter().zip(end).map(|(a, b)| b - a).collect(),
            PathSpec::Bent { start, end, bend } => {
                let w = std::f64::consts::PI * (std::f64::consts::PI * s).cos();
                start.iter().zip(end).zip(bend).map(|((a, b), c)| b - a + w * c).collect()
            }
        }
    }

    fn check_dims(&self) -> Result<()> {
        let m = self.m();
        let ok = match self {
            PathSpec::Line { end, .. } => end.len() == m,
            PathSpec::Bent { end, bend, .. } => end.len() == m && bend.len() == m,
        };
        if ok && m >= 2 {
            Ok(())
        } else {
            Err(LabError::Dimension("path endpoints must share dimension m ≥ 2".into()))
        }
    }

    /// `γ(0)` on the lateral boundary and the whole image (sampled at 101
    /// points) inside the space-time box of `grid`.
    pub fn check(&self, grid: &SpacetimeGrid) -> Result<()> {
        self.check_dims()?;
        if self.m() != grid.m() {
            return Err(LabError::Dimension(format!(
                "path lives in dimension {}, grid in {}",
                self.m(),
                grid.m()
            )));
        }
        let tol = 1e-12 * grid.side_length();
        let p0 = self.start();
        let on_boundary = grid.extent().iter().enumerate().any(|(i, &(lo, hi))| {
            (p0[i + 1] - lo).abs() <= tol || (p0[i + 1] - hi).abs() <= tol
        });
        if !on_boundary {
            return Err(LabError::InvalidArgument(format!("γ(0) = {p0:?} is not on the lateral boundary")));
        }
        for i in 0..=100 {
            let p = self.point(i as f64 / 100.0);
            in_domain(grid, &p)?;
        }
        Ok(())
    }
}

fn in_domain(grid: &SpacetimeGrid, p: &[f64]) -> Result<()> {
    let tol = 1e-9 * grid.side_length();
    let inside_t = p[0] >= -tol && p[0] <= grid.t_final() + tol;
    let inside_x = grid
        .extent()
        .iter()
        .zip(&p[1..])
        .all(|(&(lo, hi), &x)| x >= lo - tol && x <= hi + tol);
    if inside_t && inside_x {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("point {p:?} lies outside the domain")))
    }
}

/// Analytic geometry of `metric` at a point of its domain.
pub fn geometry_at(metric: &MetricSpec, p: &[f64]) -> Result<PointGeometry> {
    in_domain(metric.grid(), p)?;
    let h = metric
        .log_half_c_jet(p)
        .ok_or_else(|| LabError::UnsupportedMetric("jet ODE needs analytic conformal factors".into()))?;
    let g = conformal_static_geometry(&h, &metric.base().jet(&p[1..]));
    g.schouten()?;
    Ok(g)
}

/// The individual pieces of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsTerms {
    /// `γ̇ᵏ Xʲ_c Γᶜ_kl(γ)`, `m × m`.
    pub christoffel_source: Vec<f64>,
    /// `γ̇ᵏ Γʲ_ab(Z) Xᵃ_k Xᵇ_l`.
    pub christoffel_target: Vec<f64>,
    /// `γ̇ᵏ Xʲ_c 𝒩ᶜ_kl(Y)`.
    pub nonlinear_x: Vec<f64>,
    /// `γ̇ᵏ P_kj(γ)`.
    pub schouten_source: Vec<f64>,
    /// `γ̇ᵏ Xᵇ_k Xᶜ_j P_bc(Z)`.
    pub schouten_target: Vec<f64>,
    /// `γ̇ᵏ (ℳ_kj(Y) + Γᶜ_kj(γ) Y_c)`.
    pub nonlinear_y: Vec<f64>,
    /// `γ̇ᵏ Xʲ_k`.
    pub transport: Vec<f64>,
}

pub fn rhs_terms(state: &JetState, s: f64, path: &PathSpec, metric: &MetricSpec) -> Result<RhsTerms> {
    let m = metric.m();
    if state.m() != m || path.m() != m || state.x.len() != m * m || state.y.len() != m {
        return Err(LabError::Dimension(format!("jet state and path must have dimension m = {m}")));
    }
    let gp = path.point(s);
    let v = path.velocity(s);
    let src = geometry_at(metric, &gp)?;
    let tgt = geometry_at(metric, &state.z)?;
    let (ps, pt) = (src.schouten()?, tgt.schouten()?);
    let x = |j: usize, l: usize| state.x[j * m + l];
    let y = &state.y;

    let yy: f64 = (0..m * m).map(|ab| src.inverse[ab] * y[ab / m] * y[ab % m]).sum();
    let raised: Vec<f64> = (0..m).map(|c| (0..m).map(|a| src.inverse[c * m + a] * y[a]).sum()).collect();
    let nonlin = |c: usize, k: usize, l: usize| {
        let mut v = -raised[c] * src.metric[k * m + l];
        if c == l {
            v += y[k];
        }
        if c == k {
            v += y[l];
        }
        v
    };

    let mut christoffel_source = vec![0.0; m * m];
    let mut christoffel_target = vec![0.0; m * m];
    let mut nonlinear_x = vec![0.0; m * m];
    for j in 0..m {
        for l in 0..m {
            let (mut cs, mut ct, mut nx) = (0.0, 0.0, 0.0);
            for k in 0..m {
                if v[k] == 0.0 {
                    continue;
                }
                for c in 0..m {
                    cs += v[k] * x(j, c) * src.gamma(c, k, l);
                    nx += v[k] * x(j, c) * nonlin(c, k, l);
                }
                for a in 0..m {
                    for b in 0..m {
                        ct += v[k] * tgt.gamma(j, a, b) * x(a, k) * x(b, l);
                    }
                }
            }
            christoffel_source[j * m + l] = cs;
            christoffel_target[j * m + l] = ct;
            nonlinear_x[j * m + l] = nx;
        }
    }
    let mut schouten_source = vec![0.0; m];
    let mut schouten_target = vec![0.0; m];
    let mut nonlinear_y = vec![0.0; m];
    let mut transport = vec![0.0; m];
    for j in 0..m {
        for k in 0..m {
            if v[k] == 0.0 {
                continue;
            }
            schouten_source[j] += v[k] * ps[k * m + j];
            let mut pull = 0.0;
            for b in 0..m {
                for c in 0..m {
                    pull += x(b, k) * x(c, j) * pt[b * m + c];
                }
            }
            schouten_target[j] += v[k] * pull;
            let conn: f64 = (0..m).map(|c| src.gamma(c, k, j) * y[c]).sum();
            nonlinear_y[j] += v[k] * (y[k] * y[j] - 0.5 * yy * src.metric[k * m + j] + conn);
            transport[j] += v[k] * x(j, k);
        }
    }
    Ok(RhsTerms {
        christoffel_source,
        christoffel_target,
        nonlinear_x,
        schouten_source,
        schouten_target,
        nonlinear_y,
        transport,
    })
}

/// `∂_s (X, Y, Z)` at `s`.
pub fn jet_ode_rhs(state: &JetState, s: f64, path: &PathSpec, metric: &MetricSpec) -> Result<JetState> {
    let t = rhs_terms(state, s, path, metric)?;
    let x = (0..t.christoffel_source.len())
        .map(|i| t.christoffel_source[i] + t.nonlinear_x[i] - t.christoffel_target[i])
        .collect();
    let y = (0..t.schouten_source.len())
        .map(|j| t.nonlinear_y[j] + t.schouten_source[j] - t.schouten_target[j])
        .collect();
    Ok(JetState { x, y, z: t.transport })
}

/// Largest mismatch between the paired terms on the identity orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub christoffel: f64,
    pub schouten: f64,
    /// Largest `|𝒩|`, `|ℳ|` contribution (zero at `Y = 0`).
    pub nonlinear: f64,
    /// Largest magnitude of the individual Christoffel and Schouten terms.
    pub term_scale: f64,
}

/// Evaluates the RHS pieces at `(I, 0, γ(s))` for `samples + 1` equally spaced `s`.
pub fn equilibrium_cancellation(path: &PathSpec, metric: &MetricSpec, samples: usize) -> Result<CancellationReport> {
    let mut rep = CancellationReport {
        christoffel: 0.0,
        schouten: 0.0,
        nonlinear: 0.0,
        term_scale: 0.0,
    };
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let amax = |a: &[f64]| a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for i in 0..=samples.max(1) {
        let s = i as f64 / samples.max(1) as f64;
        let t = rhs_terms(&JetState::identity(&path.point(s)), s, path, metric)?;
        rep.christoffel = rep.christoffel.max(diff(&t.christoffel_source, &t.christoffel_target));
        rep.schouten = rep.schouten.max(diff(&t.schouten_source, &t.schouten_target));
        rep.nonlinear = rep.nonlinear.max(amax(&t.nonlinear_x).max(amax(&t.nonlinear_y)));
        rep.term_scale = rep
            .term_scale
            .max(amax(&t.christoffel_source))
            .max(amax(&t.schouten_source));
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub states: Vec<JetState>,
    /// `max_s ‖(X, Y, Z)(s) − (I, 0, γ(s))‖_∞`.
    pub deviation: f64,
}

impl Trajectory {
    /// `s, X.., Y.., Z.., deviation` per step.
    pub fn write_csv<W: Write>(&self, path: &PathSpec, mut out: W) -> Result<()> {
        let m = path.m();
        write!(out, "s")?;
        for j in 0..m {
            for l in 0..m {
                write!(out, ",X{j}{l}")?;
            }
        }
        for j in 0..m {
            write!(out, ",Y{j}")?;
        }
        for j in 0..m {
            write!(out, ",Z{j}")?;
        }
        writeln!(out, ",deviation")?;
        for (s, st) in self.s.iter().zip(&self.states) {
            write!(out, "{}", fmt17(*s))?;
            for v in st.x.iter().chain(&st.y).chain(&st.z) {
                write!(out, ",{}", fmt17(*v))?;
            }
            writeln!(out, ",{}", fmt17(st.deviation_from_identity(&path.point(*s))))?;
        }
        Ok(())
    }
}

/// Classical RK4 with step `1/steps` over `s ∈ [0, 1]`.
pub fn integrate_jet_ode(init: &JetState, path: &PathSpec, metric: &MetricSpec, steps: usize) -> Result<Trajectory> {
    if steps < 10 {
        return Err(LabError::InvalidArgument(format!("need at least 10 steps, got {steps}")));
    }
    path.check_dims()?;
    let ds = 1.0 / steps as f64;
    let mut state = init.clone();
    let mut out = Trajectory {
        s: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        deviation: init.deviation_from_identity(&path.point(0.0)),
    };
    out.s.push(0.0);
    out.states.push(state.clone());
    for i in 0..steps {
        let s = i as f64 * ds;
        let k1 = jet_ode_rhs(&state, s, path, metric)?;
        let k2 = jet_ode_rhs(&state.axpy(0.5 * ds, &k1), s + 0.5 * ds, path, metric)?;
        let k3 = jet_ode_rhs(&state.axpy(0.5 * ds, &k2), s + 0.5 * ds, path, metric)?;
        let k4 = jet_ode_rhs(&state.axpy(ds, &k3), s + ds, path, metric)?;
        state = state
            .axpy(ds / 6.0, &k1)
            .axpy(ds / 3.0, &k2)
            .axpy(ds / 3.0, &k3)
            .axpy(ds / 6.0, &k4);
        let s1 = (i + 1) as f64 * ds;
        if !state.is_finite() || state.norm_inf() > BLOW_UP {
            return Err(LabError::Integration(format!(
                "jet state blew up at s = {s1}: ‖state‖ = {}",
                state.norm_inf()
            )));
        }
        out.deviation = out.deviation.max(state.deviation_from_identity(&path.point(s1)));
        out.s.push(s1);
        out.states.push(state.clone());
    }
    Ok(out)
}
