//! Second-order finite-difference stencils on a [`SpacetimeGrid`].
//!
//! Interior nodes use 3-point central differences; nodes on the grid skin use
//! one-sided second-order variants (3 points for first derivatives, 4 points
//! for second derivatives). Every stencil is exact on quadratics.

use crate::grid::SpacetimeGrid;

/// Node indices and weights of a 1-D difference stencil.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub nodes: [usize; 4],
    pub weights: [f64; 4],
    pub len: usize,
}

impl Stencil {
    /// Weights sum to zero, so values are taken relative to the first node;
    /// constants then difference to exactly zero.
    pub fn apply(&self, f: impl Fn(usize) -> f64) -> f64 {
        let f0 = f(self.nodes[0]);
        (1..self.len).map(|j| self.weights[j] * (f(self.nodes[j]) - f0)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |j| (self.nodes[j], self.weights[j]))
    }
}

/// Position of `idx` along `axis`: `(i, count)`.
fn locate(grid: &SpacetimeGrid, axis: usize, idx: usize) -> (usize, usize) {
    (grid.spacetime_axis_index(idx, axis), grid.axis_len(axis))
}

/// True when `idx` has a neighbour on both sides along `axis`.
pub fn is_inner(grid: &SpacetimeGrid, axis: usize, idx: usize) -> bool {
    let (i, count) = locate(grid, axis, idx);
    i > 0 && i + 1 < count
}

/// `∂/∂x^axis` at flat space-time index `idx`.
pub fn first(grid: &SpacetimeGrid, axis: usize, idx: usize) -> Stencil {
    let (i, count) = locate(grid, axis, idx);
    let s = grid.stride(axis);
    let inv = 1.0 / grid.spacing(axis);
    if i > 0 && i + 1 < count {
        Stencil {
            nodes: [idx - s, idx + s, 0, 0],
            weights: [-0.5 * inv, 0.5 * inv, 0.0, 0.0],
            len: 2,
        }
    } else if i == 0 {
        Stencil {
            nodes: [idx, idx + s, idx + 2 * s, 0],
            weights: [-1.5 * inv, 2.0 * inv, -0.5 * inv, 0.0],
            len: 3,
        }
    } else {
        Stencil {
            nodes: [idx, idx - s, idx - 2 * s, 0],
            weights: [1.5 * inv, -2.0 * inv, 0.5 * inv, 0.0],
            len: 3,
        }
    }
}

/// `∂²/∂(x^axis)²` at flat space-time index `idx`.
pub fn second(grid: &SpacetimeGrid, axis: usize, idx: usize) -> Stencil {
    let (i, count) = locate(grid, axis, idx);
    let s = grid.stride(axis);
    let inv = 1.0 / (grid.spacing(axis) * grid.spacing(axis));
    if i > 0 && i + 1 < count {
        Stencil {
            nodes: [idx - s, idx, idx + s, 0],
            weights: [inv, -2.0 * inv, inv, 0.0],
            len: 3,
        }
    } else if i == 0 {
        Stencil {
            nodes: [idx, idx + s, idx + 2 * s, idx + 3 * s],
            weights: [2.0 * inv, -5.0 * inv, 4.0 * inv, -inv],
            len: 4,
        }
    } else {
        Stencil {
            nodes: [idx, idx - s, idx - 2 * s, idx - 3 * s],
            weights: [2.0 * inv, -5.0 * inv, 4.0 * inv, -inv],
            len: 4,
        }
    }
}

/// First derivative of a nodal quantity.
pub fn d1(grid: &SpacetimeGrid, axis: usize, idx: usize, f: impl Fn(usize) -> f64) -> f64 {
    first(grid, axis, idx).apply(f)
}

/// Second derivative `∂_a ∂_b` of a nodal quantity; mixed derivatives nest
/// two first-derivative stencils.
pub fn d2(grid: &SpacetimeGrid, a: usize, b: usize, idx: usize, f: impl Fn(usize) -> f64) -> f64 {
    if a == b {
        second(grid, a, idx).apply(f)
    } else {
        let outer = first(grid, a, idx);
        outer
            .iter()
            .map(|(j, w)| w * first(grid, b, j).apply(&f))
            .sum()
    }
}

/// Gradient (length `m`) of nodal values at `idx`.
pub fn gradient(grid: &SpacetimeGrid, idx: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..grid.m()).map(|a| d1(grid, a, idx, &f)).collect()
}

/// Hessian (row-major `m × m`, symmetrised) of nodal values at `idx`.
pub fn hessian(grid: &SpacetimeGrid, idx: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let m = grid.m();
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v = if a == b {
                d2(grid, a, a, idx, &f)
            } else {
                0.5 * (d2(grid, a, b, idx, &f) + d2(grid, b, a, idx, &f))
            };
            out[a * m + b] = v;
            out[b * m + a] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;

    #[test]
    fn exact_on_quadratics_everywhere() {
        let g = SpacetimeGrid::unit(2, 6, 0.4, 0.4).unwrap();
        let q = |p: &[f64]| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[0] + 3.0 * p[1] * p[2] - p[2] * p[2];
        let f = ScalarField::sample(&g, q);
        let v = f.values();
        for idx in 0..g.len() {
            let p = {
                let s = g.spatial_len();
                g.point(idx / s, idx % s)
            };
            let grad = gradient(&g, idx, |j| v[j]);
            let expect = [2.0 + p[0], -1.0 + 3.0 * p[2], 3.0 * p[1] - 2.0 * p[2]];
            for a in 0..3 {
                assert!((grad[a] - expect[a]).abs() < 1e-11, "grad {a} at {idx}");
            }
            let hess = hessian(&g, idx, |j| v[j]);
            let expect_h = [1.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 3.0, -2.0];
            for c in 0..9 {
                assert!((hess[c] - expect_h[c]).abs() < 1e-9, "hess {c} at {idx}");
            }
        }
    }
}
