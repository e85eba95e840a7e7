//! Divergence-form coefficients of `□_g` for `g = c·(−dt² + a δ dx²)`.
//!
//! With `|g|^{1/2} = c^{m/2} a^{n/2}`, `g^{00} = −1/c` and `g^{ij} = δ^{ij}/(c a)`,
//!
//! ```text
//! □_g u = c^{−m/2} a^{−n/2} [ ∂_t(W ∂_t u) − ∇·(V ∇u) ],
//! W = c^{(m−2)/2} a^{n/2},   V = c^{(m−2)/2} a^{n/2−1},
//! ```
//!
//! so `□_g u = 0` is `∂_t(W ∂_t u) = ∇·(V ∇u)`.

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::geometry::flux_weights;
use crate::grid::SpacetimeGrid;
use crate::metric::{MetricSpec, TimeLevel};
use crate::par;

/// Largest spatial dimension handled by the stepping kernels.
pub const MAX_DIM: usize = 7;

/// Evaluator of `W` and `V` on whole time levels (nodes or half steps).
#[derive(Debug, Clone)]
pub struct CoefficientFields<'a> {
    metric: &'a MetricSpec,
    a: Vec<f64>,
    positions: Vec<f64>,
}

pub fn derive_coefficients(metric: &MetricSpec) -> Result<CoefficientFields<'_>> {
    let grid = metric.grid();
    let n = grid.n();
    if n > MAX_DIM {
        return Err(LabError::UnsupportedMetric(format!(
            "spatial dimension {n} exceeds {MAX_DIM}"
        )));
    }
    let spatial = grid.spatial_len();
    let mut positions = Vec::with_capacity(spatial * n);
    let mut a = Vec::with_capacity(spatial);
    for node in 0..spatial {
        let x = grid.position(node);
        a.push(metric.a_at(&x));
        positions.extend(x);
    }
    Ok(CoefficientFields {
        metric,
        a,
        positions,
    })
}

impl CoefficientFields<'_> {
    pub fn grid(&self) -> &SpacetimeGrid {
        self.metric.grid()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    fn weights(&self, level: TimeLevel, node: usize) -> (f64, f64) {
        let n = self.grid().n();
        let mut p = [0.0; MAX_DIM + 1];
        p[0] = level.time(self.grid());
        p[1..=n].copy_from_slice(&self.positions[node * n..(node + 1) * n]);
        let c = self.metric.c_at(&p[..=n], level, node);
        flux_weights(n + 1, c, self.a[node])
    }

    /// `W` on every spatial node at `level`.
    pub fn fill_w(&self, level: TimeLevel, out: &mut [f64]) {
        par::fill_indexed(out, |i| self.weights(level, i).0);
    }

    /// `V` on every spatial node at `level`.
    pub fn fill_v(&self, level: TimeLevel, out: &mut [f64]) {
        par::fill_indexed(out, |i| self.weights(level, i).1);
    }

    /// Largest `V/W = 1/a`, the squared coordinate wave speed.
    pub fn max_speed_squared(&self) -> f64 {
        self.a.iter().fold(0.0, |acc, &a| acc.max(1.0 / a))
    }

    /// `W` and `V` at every node level as space-time fields.
    pub fn to_fields(&self) -> Result<(ScalarField, ScalarField)> {
        let grid = self.grid();
        let spatial = grid.spatial_len();
        let mut w = vec![0.0; grid.len()];
        let mut v = vec![0.0; grid.len()];
        for k in 0..grid.levels() {
            let range = k * spatial..(k + 1) * spatial;
            self.fill_w(TimeLevel::Node(k), &mut w[range.clone()]);
            self.fill_v(TimeLevel::Node(k), &mut v[range]);
        }
        Ok((ScalarField::from_values(grid, w)?, ScalarField::from_values(grid, v)?))
    }
}
