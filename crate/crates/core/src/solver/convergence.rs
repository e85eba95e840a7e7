//! Refinement studies of named error functionals.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::SpacetimeGrid;

/// A scalar error measured on one grid.
pub trait ErrorFunctional: Sync {
    fn name(&self) -> &str;

    fn error(&self, grid: &SpacetimeGrid) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelError {
    pub nodes: usize,
    pub h: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub functional: String,
    pub levels: Vec<LevelError>,
    /// `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`; `None` when either error is 0.
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceReport {
    pub fn from_levels(functional: &str, levels: Vec<LevelError>) -> Self {
        let orders = levels
            .windows(2)
            .map(|w| observed_order(w[0].error, w[1].error, w[0].h / w[1].h))
            .collect();
        ConvergenceReport {
            functional: functional.to_string(),
            levels,
            orders,
        }
    }

    pub fn min_order(&self) -> Option<f64> {
        self.orders
            .iter()
            .map(|o| o.unwrap_or(f64::NAN))
            .fold(None, |acc: Option<f64>, o| Some(acc.map_or(o, |a| a.min(o))))
    }

    pub fn finest_error(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.error)
    }

    /// Least-squares slope of `log e` against `log h` over nonzero levels.
    pub fn fitted_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .levels
            .iter()
            .filter(|l| l.error > 0.0)
            .map(|l| (l.h.ln(), l.error.ln()))
            .collect();
        least_squares_slope(&pts)
    }
}

pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> Option<f64> {
    if coarse > 0.0 && fine > 0.0 {
        Some((coarse / fine).ln() / ratio.ln())
    } else {
        None
    }
}

/// Slope of the least-squares line through `(x, y)` points (at least two
/// distinct `x`).
pub fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Evaluates `functional` on `grids` (coarse to fine).
pub fn convergence_study(functional: &dyn ErrorFunctional, grids: &[SpacetimeGrid]) -> Result<ConvergenceReport> {
    if grids.len() < 2 {
        return Err(LabError::InvalidArgument("a convergence study needs ≥ 2 levels".into()));
    }
    let mut levels = Vec::with_capacity(grids.len());
    for g in grids {
        levels.push(LevelError {
            nodes: g.nodes_per_axis(),
            h: g.h(),
            error: functional.error(g)?,
        });
    }
    Ok(ConvergenceReport::from_levels(functional.name(), levels))
}

/// `grid`, then `levels − 1` successive halvings of the spacing.
pub fn refinement_ladder(grid: &SpacetimeGrid, levels: usize) -> Result<Vec<SpacetimeGrid>> {
    let mut out = vec![grid.clone()];
    while out.len() < levels {
        let next = out.last().expect("non-empty").refined()?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Power(f64);

    impl ErrorFunctional for Power {
        fn name(&self) -> &str {
            "power"
        }

        fn error(&self, grid: &SpacetimeGrid) -> Result<f64> {
            Ok(3.0 * grid.h().powf(self.0))
        }
    }

    #[test]
    fn recovers_exact_orders() {
        let g = SpacetimeGrid::unit(1, 9, 1.0, 0.5).unwrap();
        let grids = refinement_ladder(&g, 3).unwrap();
        let r = convergence_study(&Power(2.0), &grids).unwrap();
        for o in &r.orders {
            assert!((o.unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((r.fitted_slope().unwrap() - 2.0).abs() < 1e-12);
        let zero = convergence_study(&Power(f64::INFINITY), &grids).unwrap();
        assert!(zero.orders.iter().all(Option::is_none));
        assert!(convergence_study(&Power(2.0), &grids[..1]).is_err());
    }
}
