//! Grid evaluation of the invariant wave operator, Christoffel symbols and
//! curvature for the supported metric family.

pub mod conformal;
pub mod hyperbolic;
pub mod pointwise;

use crate::error::{LabError, Result};
use crate::field::{for_each_point, ScalarField, TensorField, TensorLayout, sym_index};
use crate::function::Jet;
use crate::grid::SpacetimeGrid;
use crate::metric::{MetricSpec, TimeLevel};
use crate::par;
use crate::stencil;

pub use conformal::{conformal_wave_operator_residual, scalar_curvature_conformal_check};
pub use hyperbolic::{strict_hyperbolicity_check, HyperbolicityReport};
pub use pointwise::{conformal_static_geometry, PointGeometry};

/// `c` sampled at every node.
pub fn sample_c(metric: &MetricSpec) -> Result<ScalarField> {
    let grid = metric.grid();
    let spatial = grid.spatial_len();
    let mut values = vec![0.0; grid.len()];
    for_each_point(grid, |idx, p| {
        values[idx] = metric.c_at(p, TimeLevel::Node(idx / spatial), idx % spatial);
    });
    if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(LabError::NonPositive {
            what: "c",
            value,
            node,
        });
    }
    ScalarField::from_values(grid, values)
}

/// `a` sampled at every spatial node of one level.
pub fn sample_a(metric: &MetricSpec) -> Vec<f64> {
    let grid = metric.grid();
    (0..grid.spatial_len())
        .map(|i| metric.a_at(&grid.position(i)))
        .collect()
}

/// Flux weights `W = c^{(m−2)/2} a^{n/2}`, `V = c^{(m−2)/2} a^{n/2−1}` from `c` and `a`.
pub fn flux_weights(m: usize, c: f64, a: f64) -> (f64, f64) {
    let n = (m - 1) as f64;
    let cp = if m == 3 { c.sqrt() } else { c.powf(0.5 * (m as f64 - 2.0)) };
    let an = if m == 3 { a } else { a.powf(0.5 * n) };
    (cp * an, cp * an / a)
}

/// `□_g u = −|g|^{−1/2} ∂_a(|g|^{1/2} g^{ab} ∂_b u)` on the grid, in the
/// divergence form `(∂_t(W ∂_t u) − ∇·(V ∇u)) / (c^{m/2} a^{n/2})` so that
/// `□_η = ∂_t² − Δ`.
///
/// Inner nodes along an axis use the conservative 3-point flux stencil with
/// half-node weights averaged from the nodes; skin nodes use the expanded form
/// `K ∂²u + ∂K ∂u` with one-sided second-order stencils.
pub fn wave_operator_residual(metric: &MetricSpec, u: &ScalarField) -> Result<ScalarField> {
    let grid = metric.grid();
    if u.grid() != grid {
        return Err(LabError::GridMismatch(format!(
            "field on {}, metric on {}",
            u.grid().descriptor(),
            grid.descriptor()
        )));
    }
    let c = sample_c(metric)?;
    let a = sample_a(metric);
    let m = grid.m();
    let spatial = grid.spatial_len();
    let mut w = vec![0.0; grid.len()];
    let mut v = vec![0.0; grid.len()];
    let mut norm = vec![0.0; grid.len()];
    for idx in 0..grid.len() {
        let (wi, vi) = flux_weights(m, c.values()[idx], a[idx % spatial]);
        w[idx] = wi;
        v[idx] = vi;
        norm[idx] = c.values()[idx] * wi;
    }
    let uv = u.values();
    let values = par::map_indexed(grid.len(), |idx| {
        let mut total = 0.0;
        for axis in 0..m {
            let weight = if axis == 0 { &w } else { &v };
            let term = divergence_term(grid, axis, idx, weight, uv);
            if axis == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total / norm[idx]
    });
    ScalarField::from_values(grid, values)
}

/// `∂_axis(K ∂_axis u)` at `idx`.
fn divergence_term(grid: &SpacetimeGrid, axis: usize, idx: usize, k: &[f64], u: &[f64]) -> f64 {
    if stencil::is_inner(grid, axis, idx) {
        let s = grid.stride(axis);
        let d = grid.spacing(axis);
        let kp = 0.5 * (k[idx] + k[idx + s]);
        let km = 0.5 * (k[idx] + k[idx - s]);
        (kp * (u[idx + s] - u[idx]) - km * (u[idx] - u[idx - s])) / (d * d)
    } else {
        let uxx = stencil::second(grid, axis, idx).apply(|j| u[j]);
        let ux = stencil::first(grid, axis, idx).apply(|j| u[j]);
        let kx = stencil::first(grid, axis, idx).apply(|j| k[j]);
        k[idx] * uxx + kx * ux
    }
}

/// Finite-difference jet of a nodal field at `idx`.
pub fn fd_jet(grid: &SpacetimeGrid, idx: usize, values: &[f64]) -> Jet {
    Jet {
        value: values[idx],
        grad: stencil::gradient(grid, idx, |j| values[j]),
        hess: stencil::hessian(grid, idx, |j| values[j]),
    }
}

/// `Γ^i_kl(e^{2h} g)` on the grid, `h` given as a field and differentiated by
/// finite differences; `g` is the (analytic) static base of `base`, including
/// any analytic conformal factors it already carries.
pub fn christoffel_conformal(hfield: &ScalarField, base: &MetricSpec) -> Result<TensorField> {
    let grid = base.grid();
    if hfield.grid() != grid {
        return Err(LabError::GridMismatch("h field and base metric grids differ".into()));
    }
    if !base.is_analytic() {
        return Err(LabError::UnsupportedMetric(
            "base Christoffel symbols need analytic factors".into(),
        ));
    }
    let m = grid.m();
    let spatial = grid.spatial_len();
    let hv = hfield.values();
    let per_node = par::map_indexed(grid.len(), |idx| {
        let p = grid.point(idx / spatial, idx % spatial);
        let mut h = fd_jet(grid, idx, hv);
        h.add_assign(&base.log_half_c_jet(&p).expect("analytic base"));
        let a = base.base().jet(&p[1..]);
        conformal_static_geometry(&h, &a).christoffel
    });
    let mut out = TensorField::zeros(grid, TensorLayout::Christoffel(m));
    for (idx, gamma) in per_node.into_iter().enumerate() {
        out.node_mut(idx).copy_from_slice(&gamma);
    }
    Ok(out)
}

/// Ricci tensor, scalar curvature and Schouten tensor of a metric on its grid.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub ricci: TensorField,
    pub scalar: ScalarField,
    pub schouten: TensorField,
}

/// Pointwise geometry at every node with `h = ½ ln c` differentiated by finite
/// differences and the static base evaluated analytically.
fn node_geometries<T: Send>(
    metric: &MetricSpec,
    extract: impl Fn(PointGeometry) -> T + Sync + Send,
) -> Result<Vec<T>> {
    let grid = metric.grid();
    let c = sample_c(metric)?;
    let h: Vec<f64> = c.values().iter().map(|v| 0.5 * v.ln()).collect();
    let spatial = grid.spatial_len();
    let positions: Vec<Vec<f64>> = (0..spatial).map(|i| grid.position(i)).collect();
    Ok(par::map_indexed(grid.len(), |idx| {
        let jet = fd_jet(grid, idx, &h);
        let a = metric.base().jet(&positions[idx % spatial]);
        extract(conformal_static_geometry(&jet, &a))
    }))
}

/// `R_ab`, `R` and `P_ab` of `metric = e^{2h} g₀` on the grid.
pub fn curvature_suite(metric: &MetricSpec) -> Result<Curvature> {
    let grid = metric.grid();
    let m = grid.m();
    if m < 3 {
        return Err(LabError::Dimension(
            "curvature suite needs n ≥ 2 (Schouten divides by m − 2)".into(),
        ));
    }
    let nodes = node_geometries(metric, |g| g)?;
    let mut ricci = TensorField::zeros(grid, TensorLayout::Symmetric(m));
    let mut schouten = TensorField::zeros(grid, TensorLayout::Symmetric(m));
    let mut scalar = vec![0.0; grid.len()];
    for (idx, g) in nodes.into_iter().enumerate() {
        let p = g.schouten.as_ref().expect("m ≥ 3");
        let r = ricci.node_mut(idx);
        for a in 0..m {
            for b in a..m {
                r[sym_index(m, a, b)] = g.ricci[a * m + b];
            }
        }
        let s = schouten.node_mut(idx);
        for a in 0..m {
            for b in a..m {
                s[sym_index(m, a, b)] = p[a * m + b];
            }
        }
        scalar[idx] = g.scalar;
    }
    Ok(Curvature {
        ricci,
        scalar: ScalarField::from_values(grid, scalar)?,
        schouten,
    })
}

/// Scalar curvature only (same discretisation as [`curvature_suite`]).
pub fn scalar_curvature(metric: &MetricSpec) -> Result<ScalarField> {
    let values = node_geometries(metric, |g| g.scalar)?;
    ScalarField::from_values(metric.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Polynomial2;

    #[test]
    fn quadratic_on_minkowski_is_exact() {
        let g = SpacetimeGrid::unit(2, 7, 0.5, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        // □(t² − x² + 3xy + y + t) = 2 − (−2) = 4
        let u = ScalarField::sample(&g, |p| p[0] * p[0] - p[1] * p[1] + 3.0 * p[1] * p[2] + p[2] + p[0]);
        let r = wave_operator_residual(&eta, &u).unwrap();
        for &v in r.values() {
            assert!((v - 4.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn constant_gives_exact_zero() {
        let g = SpacetimeGrid::unit(2, 7, 0.5, 0.5).unwrap();
        let metric = MetricSpec::minkowski(&g)
            .with_factor(Polynomial2::affine(3, 1.0, 1, 0.2).into(), 4.0)
            .unwrap();
        let u = ScalarField::constant(&g, 3.7);
        let r = wave_operator_residual(&metric, &u).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g = SpacetimeGrid::unit(2, 7, 0.5, 0.5).unwrap();
        let other = SpacetimeGrid::unit(2, 9, 0.5, 0.5).unwrap();
        let u = ScalarField::zeros(&other);
        assert!(wave_operator_residual(&MetricSpec::minkowski(&g), &u).is_err());
    }

    #[test]
    fn flux_weight_exponents() {
        // m = 3: W = c^{1/2} a, V = c^{1/2}
        let (w, v) = flux_weights(3, 16.0, 4.0);
        assert_eq!((w, v), (16.0, 4.0));
        // m = 4: W = c a^{3/2}, V = c a^{1/2}
        let (w, v) = flux_weights(4, 2.0, 4.0);
        assert!((w - 16.0).abs() < 1e-14 && (v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn curvature_of_minkowski_vanishes() {
        let g = SpacetimeGrid::unit(2, 6, 0.4, 0.4).unwrap();
        let k = curvature_suite(&MetricSpec::minkowski(&g)).unwrap();
        assert_eq!(k.ricci.max_abs(), 0.0);
        assert_eq!(k.scalar.max_abs(), 0.0);
        assert_eq!(k.schouten.max_abs(), 0.0);
    }

    #[test]
    fn curvature_rejects_two_dimensions() {
        let g = SpacetimeGrid::unit(1, 6, 0.4, 0.4).unwrap();
        assert!(curvature_suite(&MetricSpec::minkowski(&g)).is_err());
    }

    #[test]
    fn christoffel_of_linear_h() {
        let g = SpacetimeGrid::unit(2, 6, 0.4, 0.4).unwrap();
        let h = ScalarField::sample(&g, |p| p[1]);
        let gamma = christoffel_conformal(&h, &MetricSpec::minkowski(&g)).unwrap();
        for idx in 0..g.len() {
            assert!((gamma.christoffel(idx, 1, 0, 0) - 1.0).abs() < 1e-12);
        }
        let zero = christoffel_conformal(&ScalarField::zeros(&g), &MetricSpec::minkowski(&g)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }
}
