//! Strict hyperbolicity of the principal symbol along `ξ + λ dτ`, `τ = t`:
//! `g⁻¹(ξ + λdτ, ξ + λdτ) = aλ² + bλ + c` must have two real roots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::metric::{MetricSpec, TimeLevel};

/// Rejection threshold on the spatial part of `ξ`.
pub const MIN_SPATIAL_NORM: f64 = 1e-6;
pub const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub samples: usize,
    pub min_discriminant: f64,
    pub passed: bool,
    /// Draws abandoned after exhausting the rejection budget.
    pub degenerate: usize,
}

/// `(a, b, c) = (g⁻¹(dτ,dτ), 2g⁻¹(ξ,dτ), g⁻¹(ξ,ξ))` for `g = c·(−dt² + a δ dx²)`.
pub fn symbol_coefficients(c: f64, a: f64, xi: &[f64]) -> (f64, f64, f64) {
    let g00 = -1.0 / c;
    let gii = 1.0 / (c * a);
    let spatial: f64 = xi[1..].iter().map(|v| v * v).sum();
    (g00, 2.0 * g00 * xi[0], g00 * xi[0] * xi[0] + gii * spatial)
}

pub fn discriminant(c: f64, a: f64, xi: &[f64]) -> f64 {
    let (qa, qb, qc) = symbol_coefficients(c, a, xi);
    qb * qb - 4.0 * qa * qc
}

/// Samples `samples` random nodes and covectors with components uniform in
/// `[−1, 1]`, rejecting covectors whose spatial part is below
/// [`MIN_SPATIAL_NORM`].
pub fn strict_hyperbolicity_check(metric: &MetricSpec, samples: usize, seed: u64) -> Result<HyperbolicityReport> {
    if samples == 0 {
        return Err(LabError::InvalidArgument("samples must be ≥ 1".into()));
    }
    let grid = metric.grid();
    let m = grid.m();
    let spatial = grid.spatial_len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_disc = f64::INFINITY;
    let mut degenerate = 0;
    let mut taken = 0;
    for _ in 0..samples {
        let idx = rng.gen_range(0..grid.len());
        let (k, node) = (idx / spatial, idx % spatial);
        let mut xi = vec![0.0; m];
        let mut accepted = false;
        for _ in 0..MAX_REJECTIONS {
            for v in xi.iter_mut() {
                *v = rng.gen_range(-1.0..=1.0);
            }
            let norm: f64 = xi[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm >= MIN_SPATIAL_NORM {
                accepted = true;
                break;
            }
        }
        if !accepted {
            degenerate += 1;
            continue;
        }
        let p = grid.point(k, node);
        let c = metric.c_at(&p, TimeLevel::Node(k), node);
        let a = metric.a_at(&p[1..]);
        min_disc = min_disc.min(discriminant(c, a, &xi));
        taken += 1;
    }
    Ok(HyperbolicityReport {
        samples: taken,
        min_discriminant: min_disc,
        passed: taken > 0 && min_disc > 0.0,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpacetimeGrid;

    #[test]
    fn minkowski_examples() {
        assert_eq!(symbol_coefficients(1.0, 1.0, &[0.0, 1.0, 0.0]), (-1.0, 0.0, 1.0));
        assert_eq!(discriminant(1.0, 1.0, &[0.0, 1.0, 0.0]), 4.0);
        // ξ = dτ + (0,1,0): b² − 4ac = −4a·g(ξ⊥, ξ⊥) = 4
        assert!((discriminant(1.0, 1.0, &[1.0, 1.0, 0.0]) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_minkowski_passes() {
        let g = SpacetimeGrid::unit(2, 9, 0.5, 0.5).unwrap();
        let metric = MetricSpec::minkowski(&g).scaled(2.0).unwrap();
        let r = strict_hyperbolicity_check(&metric, 200, 7).unwrap();
        assert!(r.passed && r.samples == 200);
        assert!(strict_hyperbolicity_check(&metric, 0, 7).is_err());
    }
}
