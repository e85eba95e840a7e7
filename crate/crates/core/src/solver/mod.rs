//! Explicit solution of `□_g u = 0` with lateral Dirichlet data and zero
//! Cauchy data.

pub mod coefficients;
pub mod convergence;
pub mod mms;
pub mod snapshot;
pub mod source;
pub mod stepper;

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{fmt17, ScalarField};
use crate::grid::SpacetimeGrid;
use crate::metric::MetricSpec;

pub use coefficients::{derive_coefficients, CoefficientFields};
pub use convergence::{convergence_study, observed_order, ConvergenceReport, ErrorFunctional, LevelError};
pub use source::{BoundaryData, BoundarySource, FnData, Superposition, ZeroData};
pub use stepper::{check_cfl, Stepper};

/// What a solve keeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Storage {
    /// Every level at every node.
    Full,
    /// Two rolling levels plus the complete history at the listed spatial nodes.
    Traces(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub storage: Storage,
    /// Upper bound on the bytes of stored field values.
    pub memory_cap_bytes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            storage: Storage::Full,
            memory_cap_bytes: 2 << 30,
        }
    }
}

impl SolverConfig {
    pub fn traces(nodes: Vec<usize>) -> Self {
        SolverConfig {
            storage: Storage::Traces(nodes),
            ..Default::default()
        }
    }
}

/// A solved field: every level, or the histories of selected nodes.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: SpacetimeGrid,
    full: Option<ScalarField>,
    trace_nodes: Vec<usize>,
    trace_slot: HashMap<usize, usize>,
    /// Level-major `levels × trace_nodes.len()`.
    traces: Vec<f64>,
}

impl WaveField {
    pub fn from_full(field: ScalarField) -> Self {
        WaveField {
            grid: field.grid().clone(),
            full: Some(field),
            trace_nodes: Vec::new(),
            trace_slot: HashMap::new(),
            traces: Vec::new(),
        }
    }

    fn with_traces(grid: &SpacetimeGrid, nodes: Vec<usize>) -> Self {
        let trace_slot = nodes.iter().enumerate().map(|(s, &i)| (i, s)).collect();
        WaveField {
            grid: grid.clone(),
            full: None,
            traces: Vec::with_capacity(nodes.len() * grid.levels()),
            trace_nodes: nodes,
            trace_slot,
        }
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn full(&self) -> Option<&ScalarField> {
        self.full.as_ref()
    }

    pub fn into_full(self) -> Option<ScalarField> {
        self.full
    }

    pub fn trace_nodes(&self) -> &[usize] {
        &self.trace_nodes
    }

    /// `u` at level `k` and spatial node `node`, when stored.
    pub fn value(&self, k: usize, node: usize) -> Option<f64> {
        if let Some(f) = &self.full {
            return Some(f.get(k, node));
        }
        let slot = *self.trace_slot.get(&node)?;
        Some(self.traces[k * self.trace_nodes.len() + slot])
    }

    /// Applies `u ↦ op(u, k, node)` to every stored value.
    pub fn map_indexed(&self, mut op: impl FnMut(f64, usize, usize) -> f64) -> WaveField {
        let mut out = self.clone();
        let spatial = self.grid.spatial_len();
        if let Some(f) = out.full.as_mut() {
            for (idx, v) in f.values_mut().iter_mut().enumerate() {
                *v = op(*v, idx / spatial, idx % spatial);
            }
        }
        let width = self.trace_nodes.len();
        for (j, v) in out.traces.iter_mut().enumerate() {
            *v = op(*v, j / width, self.trace_nodes[j % width]);
        }
        out
    }

    /// Largest `|u|` over stored values.
    pub fn max_abs(&self) -> f64 {
        match &self.full {
            Some(f) => f.max_abs(),
            None => crate::field::max_abs(&self.traces),
        }
    }

    /// Boundary history as `t,node,value` rows (trace nodes, or every boundary
    /// node for full storage).
    pub fn write_traces_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let nodes = if self.full.is_some() {
            self.grid.boundary_nodes()
        } else {
            self.trace_nodes.clone()
        };
        writeln!(out, "t,node,value")?;
        for k in 0..self.grid.levels() {
            let t = fmt17(self.grid.time(k));
            for &node in &nodes {
                let v = self.value(k, node).expect("stored node");
                writeln!(out, "{t},{node},{}", fmt17(v))?;
            }
        }
        Ok(())
    }
}

/// Bytes needed to keep every level at every node.
pub fn full_storage_bytes(grid: &SpacetimeGrid) -> usize {
    grid.len() * std::mem::size_of::<f64>()
}

/// Solves `□_g u = 0`, `u|_Σ = data`, zero Cauchy data.
pub fn solve<D: BoundaryData + ?Sized>(metric: &MetricSpec, data: &D, cfg: &SolverConfig) -> Result<WaveField> {
    let grid = metric.grid();
    let spatial = grid.spatial_len();
    match &cfg.storage {
        Storage::Full => {
            let bytes = full_storage_bytes(grid);
            if bytes > cfg.memory_cap_bytes {
                return Err(LabError::Memory(format!(
                    "full storage needs {bytes} bytes, cap is {}",
                    cfg.memory_cap_bytes
                )));
            }
            let mut stepper = Stepper::new(metric, data)?;
            let mut values = Vec::with_capacity(grid.len());
            values.extend_from_slice(stepper.previous());
            values.extend_from_slice(stepper.current());
            while !stepper.is_done() {
                stepper.advance()?;
                values.extend_from_slice(stepper.current());
            }
            Ok(WaveField::from_full(ScalarField::from_values(grid, values)?))
        }
        Storage::Traces(nodes) => {
            if let Some(&bad) = nodes.iter().find(|&&i| i >= spatial) {
                return Err(LabError::InvalidArgument(format!("trace node {bad} out of range")));
            }
            let mut field = WaveField::with_traces(grid, nodes.clone());
            let bytes = nodes.len() * grid.levels() * std::mem::size_of::<f64>();
            if bytes > cfg.memory_cap_bytes {
                return Err(LabError::Memory(format!(
                    "traces need {bytes} bytes, cap is {}",
                    cfg.memory_cap_bytes
                )));
            }
            let mut stepper = Stepper::new(metric, data)?;
            let record = |field: &mut WaveField, level: &[f64]| {
                field.traces.extend(nodes.iter().map(|&i| level[i]));
            };
            record(&mut field, stepper.previous());
            record(&mut field, stepper.current());
            while !stepper.is_done() {
                stepper.advance()?;
                record(&mut field, stepper.current());
            }
            Ok(field)
        }
    }
}

/// First level at which `data` is nonzero at some boundary node.
pub fn first_active_level<D: BoundaryData + ?Sized>(grid: &SpacetimeGrid, data: &D) -> Option<usize> {
    let boundary = grid.boundary_nodes();
    (0..grid.levels()).find(|&k| boundary.iter().any(|&i| data.value(grid, i, k) != 0.0))
}

/// Checks that `u` vanishes exactly outside the discrete dependence cone of
/// the data: a node whose lattice (L1) distance from every node where the data
/// was ever nonzero exceeds the steps elapsed since the data switched on.
/// Returns the largest `|u|` found outside that cone.
pub fn discrete_cone_violation<D: BoundaryData + ?Sized>(field: &WaveField, data: &D) -> Result<f64> {
    let grid = field.grid();
    let full = field
        .full()
        .ok_or_else(|| LabError::InvalidArgument("cone check needs full storage".into()))?;
    let boundary = grid.boundary_nodes();
    let Some(k_on) = first_active_level(grid, data) else {
        return Ok(full.max_abs());
    };
    let support: Vec<Vec<usize>> = boundary
        .iter()
        .filter(|&&i| (k_on..grid.levels()).any(|k| data.value(grid, i, k) != 0.0))
        .map(|&i| grid.multi_index(i))
        .collect();
    let distance: Vec<usize> = (0..grid.spatial_len())
        .map(|i| {
            let mi = grid.multi_index(i);
            support
                .iter()
                .map(|s| s.iter().zip(&mi).map(|(a, b)| a.abs_diff(*b)).sum::<usize>())
                .min()
                .unwrap_or(usize::MAX)
        })
        .collect();
    let mut worst = 0.0f64;
    for k in 0..grid.levels() {
        let elapsed = k.saturating_sub(k_on);
        for (i, &d) in distance.iter().enumerate() {
            if d > elapsed || k < k_on {
                worst = worst.max(full.get(k, i).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn::patch::{BoundaryPatch, FaceSpec, PatchSpec};
    use crate::grid::{Face, Side};

    fn source(g: &SpacetimeGrid) -> BoundarySource {
        let spec = PatchSpec {
            id: "g".into(),
            faces: vec![FaceSpec {
                axis: 1,
                side: Side::Lower,
                ranges: vec![(0.25, 0.75)],
            }],
            time: (0.1, 0.9),
        };
        let p = BoundaryPatch::from_spec(g, &spec).unwrap();
        BoundarySource::new(g, &p, Face::new(1, Side::Lower), vec![(0.5, 0.15)], (0.4, 0.2), 1.0).unwrap()
    }

    #[test]
    fn traces_match_full_storage() {
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let s = source(&g);
        let full = solve(&eta, &s, &SolverConfig::default()).unwrap();
        let nodes = vec![3, 40, 100];
        let tr = solve(&eta, &s, &SolverConfig::traces(nodes.clone())).unwrap();
        assert!(full.max_abs() > 0.1);
        for k in 0..g.levels() {
            for &i in &nodes {
                assert_eq!(full.value(k, i), tr.value(k, i));
            }
        }
        assert_eq!(tr.value(0, 5), None);
    }

    #[test]
    fn memory_guard() {
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        let cfg = SolverConfig {
            storage: Storage::Full,
            memory_cap_bytes: 1000,
        };
        assert!(matches!(solve(&MetricSpec::minkowski(&g), &ZeroData, &cfg), Err(LabError::Memory(_))));
    }

    #[test]
    fn linear_in_the_data() {
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let s = source(&g);
        let mut t = s.clone();
        t.tangential = vec![(0.45, 0.1)];
        t.temporal = (0.5, 0.15);
        let combo = Superposition(vec![(2.0, s.clone()), (-0.5, t.clone())]);
        let cfg = SolverConfig::default();
        let us = solve(&eta, &s, &cfg).unwrap().into_full().unwrap();
        let ut = solve(&eta, &t, &cfg).unwrap().into_full().unwrap();
        let uc = solve(&eta, &combo, &cfg).unwrap().into_full().unwrap();
        for i in 0..g.len() {
            let expect = 2.0 * us.values()[i] - 0.5 * ut.values()[i];
            assert!((uc.values()[i] - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn discrete_cone_is_sharp() {
        let g = SpacetimeGrid::unit(2, 33, 1.0, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let s = source(&g);
        let u = solve(&eta, &s, &SolverConfig::default()).unwrap();
        assert_eq!(discrete_cone_violation(&u, &s).unwrap(), 0.0);
    }
}
