//! Manufactured solution on Minkowski space: a windowed travelling wave
//! `u*(t, x) = G(k̂·x − t + s₀)` with `|k̂| = 1`, an exact solution of
//! `□_η u = 0` whose support enters `Ω` only after `t = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::SpacetimeGrid;
use crate::metric::MetricSpec;

use super::convergence::ErrorFunctional;
use super::source::BoundaryData;
use super::stepper::Stepper;

/// `G(s) = B(s)·sin(ω s)` with `B` the unit-peak mollifier of half-width `w`
/// centred at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravellingWave {
    pub direction: Vec<f64>,
    pub shift: f64,
    pub half_width: f64,
    pub omega: f64,
}

impl TravellingWave {
    pub fn new(direction: Vec<f64>, shift: f64, half_width: f64, omega: f64) -> Result<Self> {
        let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidArgument(format!("|k̂| = {norm}, expected 1")));
        }
        if !(half_width > 0.0) {
            return Err(LabError::InvalidArgument("window half-width must be > 0".into()));
        }
        Ok(TravellingWave {
            direction,
            shift,
            half_width,
            omega,
        })
    }

    /// Wave on the unit box whose window enters through a corner at `t = 0.1`.
    /// The wide window keeps the leading edge gentle enough for the error to
    /// sit in the asymptotic range from 17 nodes on.
    pub fn default_for(n: usize) -> Self {
        let d = 1.0 / (n as f64).sqrt();
        TravellingWave::new(vec![d; n], 2.1, 2.0, 3.0 * std::f64::consts::PI).expect("unit direction")
    }

    pub fn profile(&self, s: f64) -> f64 {
        let z = s / self.half_width;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 + 1.0 / (z * z - 1.0)).exp() * (self.omega * s).sin()
    }

    pub fn exact(&self, t: f64, x: &[f64]) -> f64 {
        let kx: f64 = self.direction.iter().zip(x).map(|(a, b)| a * b).sum();
        self.profile(kx - t + self.shift)
    }
}

impl BoundaryData for TravellingWave {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64 {
        self.exact(grid.time(k), &grid.position(node))
    }
}

/// `max |u_h − u*|` over all nodes and levels of a Minkowski solve.
pub fn manufactured_error(grid: &SpacetimeGrid, wave: &TravellingWave) -> Result<f64> {
    let eta = MetricSpec::minkowski(grid);
    let positions: Vec<Vec<f64>> = (0..grid.spatial_len()).map(|i| grid.position(i)).collect();
    let level_error = |k: usize, u: &[f64]| {
        let t = grid.time(k);
        u.iter()
            .zip(&positions)
            .map(|(v, x)| (v - wave.exact(t, x)).abs())
            .fold(0.0, f64::max)
    };
    let mut stepper = Stepper::new(&eta, wave)?;
    let mut worst = level_error(0, stepper.previous()).max(level_error(1, stepper.current()));
    while !stepper.is_done() {
        stepper.advance()?;
        worst = worst.max(level_error(stepper.level(), stepper.current()));
    }
    Ok(worst)
}

impl ErrorFunctional for TravellingWave {
    fn name(&self) -> &str {
        "manufactured"
    }

    fn error(&self, grid: &SpacetimeGrid) -> Result<f64> {
        manufactured_error(grid, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_start() {
        let w = TravellingWave::default_for(2);
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        for node in 0..g.spatial_len() {
            assert_eq!(w.value(&g, node, 0), 0.0);
            assert_eq!(w.value(&g, node, 1), 0.0);
        }
        assert!(TravellingWave::new(vec![1.0, 1.0], 0.0, 0.5, 1.0).is_err());
    }
}
