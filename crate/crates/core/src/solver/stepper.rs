//! Flux-form leapfrog for `∂_t(W ∂_t u) = ∇·(V ∇u)`:
//!
//! ```text
//! W^{k+½}(u^{k+1} − u^k) − W^{k−½}(u^k − u^{k−1}) = Δt² ∇_h·(V^k ∇_h u^k)
//! ```
//!
//! with `V` averaged to half-node edges. Lateral boundary nodes take the
//! Dirichlet data; interior nodes start from `u⁰ = u¹ = 0`.

use crate::error::{LabError, Result};
use crate::grid::SpacetimeGrid;
use crate::metric::{MetricSpec, TimeLevel};
use crate::par;

use super::coefficients::{derive_coefficients, CoefficientFields};
use super::source::BoundaryData;

/// Courant safety factor applied to the leapfrog stability limit.
pub const CFL_SAFETY: f64 = 0.9;

pub struct Stepper<'a, D: BoundaryData + ?Sized> {
    grid: &'a SpacetimeGrid,
    coeffs: CoefficientFields<'a>,
    data: &'a D,
    boundary: Vec<usize>,
    interior: Vec<bool>,
    prev: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    w_lo: Vec<f64>,
    w_hi: Vec<f64>,
    v: Vec<f64>,
    k: usize,
}

/// Rejects Courant factors above `0.9/√(n·max V/W)`.
pub fn check_cfl(grid: &SpacetimeGrid, max_speed_squared: f64) -> Result<()> {
    let limit = CFL_SAFETY / (grid.n() as f64 * max_speed_squared).sqrt();
    if grid.cfl() > limit {
        return Err(LabError::Cfl(format!(
            "cfl {} exceeds {limit:.6} = 0.9/√(n·max V/W) with max V/W = {max_speed_squared}",
            grid.cfl()
        )));
    }
    Ok(())
}

impl<'a, D: BoundaryData + ?Sized> Stepper<'a, D> {
    /// Sets up levels 0 and 1. Boundary data must vanish there, since zero
    /// Cauchy data are imposed without a start-up step.
    pub fn new(metric: &'a MetricSpec, data: &'a D) -> Result<Self> {
        let grid = metric.grid();
        let coeffs = derive_coefficients(metric)?;
        check_cfl(grid, coeffs.max_speed_squared())?;
        let spatial = grid.spatial_len();
        let boundary = grid.boundary_nodes();
        for k in 0..2 {
            if let Some(&node) = boundary.iter().find(|&&i| data.value(grid, i, k) != 0.0) {
                return Err(LabError::Source(format!(
                    "boundary data nonzero at level {k}, node {node}: sources must vanish near t = 0"
                )));
            }
        }
        let interior = (0..spatial).map(|i| grid.is_interior(i)).collect();
        let mut w_lo = vec![0.0; spatial];
        coeffs.fill_w(TimeLevel::Half(0), &mut w_lo);
        Ok(Stepper {
            grid,
            coeffs,
            data,
            boundary,
            interior,
            prev: vec![0.0; spatial],
            cur: vec![0.0; spatial],
            next: vec![0.0; spatial],
            w_lo,
            w_hi: vec![0.0; spatial],
            v: vec![0.0; spatial],
            k: 1,
        })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        self.grid
    }

    /// Index of the level held in [`Self::current`].
    pub fn level(&self) -> usize {
        self.k
    }

    pub fn current(&self) -> &[f64] {
        &self.cur
    }

    pub fn previous(&self) -> &[f64] {
        &self.prev
    }

    pub fn is_done(&self) -> bool {
        self.k >= self.grid.steps()
    }

    /// Advances from level `k` to `k + 1`.
    pub fn advance(&mut self) -> Result<()> {
        if self.is_done() {
            return Err(LabError::InvalidArgument("stepper already at T".into()));
        }
        let k = self.k;
        let grid = self.grid;
        self.coeffs.fill_v(TimeLevel::Node(k), &mut self.v);
        self.coeffs.fill_w(TimeLevel::Half(k), &mut self.w_hi);
        let n = grid.n();
        let strides: Vec<usize> = (1..=n).map(|a| grid.spatial_stride(a)).collect();
        let r2 = (grid.dt() / grid.h()).powi(2);
        let (prev, cur, v, w_lo, w_hi, interior) =
            (&self.prev, &self.cur, &self.v, &self.w_lo, &self.w_hi, &self.interior);
        par::fill_indexed(&mut self.next, |i| {
            if !interior[i] {
                return 0.0;
            }
            let ui = cur[i];
            let mut div = 0.0;
            for &s in &strides {
                let vp = 0.5 * (v[i] + v[i + s]);
                let vm = 0.5 * (v[i] + v[i - s]);
                div += vp * (cur[i + s] - ui) - vm * (ui - cur[i - s]);
            }
            ui + (w_lo[i] * (ui - prev[i]) + r2 * div) / w_hi[i]
        });
        for &node in &self.boundary {
            self.next[node] = self.data.value(grid, node, k + 1);
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        std::mem::swap(&mut self.w_lo, &mut self.w_hi);
        self.k = k + 1;
        Ok(())
    }

    /// Staggered leapfrog energy between the previous and current level,
    /// `Σ W (Δ_t u)² + Σ_edges V Δu^{k+1} Δu^k / h²`, exactly conserved for
    /// time-independent coefficients and homogeneous boundary data.
    pub fn energy(&self) -> f64 {
        let grid = self.grid;
        let dt = grid.dt();
        let h2 = grid.h() * grid.h();
        let last = grid.nodes_per_axis() - 1;
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for i in 0..grid.spatial_len() {
            let du = (self.cur[i] - self.prev[i]) / dt;
            kinetic += self.w_lo[i] * du * du;
            for a in 1..=grid.n() {
                if grid.axis_index(i, a) == last {
                    continue;
                }
                let j = i + grid.spatial_stride(a);
                let ve = 0.5 * (self.v[i] + self.v[j]);
                potential += ve * (self.cur[j] - self.cur[i]) * (self.prev[j] - self.prev[i]) / h2;
            }
        }
        kinetic + potential
    }
}
