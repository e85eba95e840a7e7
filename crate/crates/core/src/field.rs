//! Space-time sampled fields and their CSV form.
//!
//! CSV rows follow the flat node order of [`SpacetimeGrid`]: columns are
//! `index,k,t,x1,…,xn` followed by the component values, each printed with
//! 17 significant digits.

use std::io::Write;

use crate::error::{LabError, Result};
use crate::grid::SpacetimeGrid;

/// Visits every space-time node with its flat index and point `(t, x)`.
pub fn for_each_point(grid: &SpacetimeGrid, mut visit: impl FnMut(usize, &[f64])) {
    let m = grid.m();
    let spatial = grid.spatial_len();
    let positions: Vec<Vec<f64>> = (0..spatial).map(|i| grid.position(i)).collect();
    let mut p = vec![0.0; m];
    for k in 0..grid.levels() {
        p[0] = grid.time(k);
        for (node, x) in positions.iter().enumerate() {
            p[1..].copy_from_slice(x);
            visit(k * spatial + node, &p);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: SpacetimeGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &SpacetimeGrid) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &SpacetimeGrid, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: &SpacetimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f(t, x)` at every node; the slice passed to `f` is `[t, x¹, …, xⁿ]`.
    pub fn sample(grid: &SpacetimeGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for_each_point(grid, |idx, p| values[idx] = f(p));
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, k: usize, node: usize) -> f64 {
        self.values[k * self.grid.spatial_len() + node]
    }

    /// One time level as a slice of `Nⁿ` values.
    pub fn level(&self, k: usize) -> &[f64] {
        let s = self.grid.spatial_len();
        &self.values[k * s..(k + 1) * s]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch(format!(
                "{} vs {}",
                self.grid.descriptor(),
                other.grid.descriptor()
            )));
        }
        Ok(())
    }

    /// Maximum absolute value (sequential, NaN-propagating).
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// Maximum absolute value over nodes accepted by `mask(k, node)`.
    pub fn max_abs_where(&self, mask: impl Fn(usize, usize) -> bool) -> f64 {
        let s = self.grid.spatial_len();
        let mut best = 0.0f64;
        for (idx, &v) in self.values.iter().enumerate() {
            if mask(idx / s, idx % s) {
                if v.is_nan() {
                    return f64::NAN;
                }
                best = best.max(v.abs());
            }
        }
        best
    }

    /// Position (flat index) of the largest absolute value.
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = i;
            }
        }
        best
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(out, &self.grid, &["value"], &self.values)
    }
}

pub fn max_abs(values: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for &v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        best = best.max(v.abs());
    }
    best
}

/// Component layout of a [`TensorField`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorLayout {
    /// `k` components per node.
    Vector(usize),
    /// Symmetric `m × m` matrix, packed upper triangle.
    Symmetric(usize),
    /// Connection coefficients `Γ^i_{kl}`, `m³` components, symmetric in `k, l`.
    Christoffel(usize),
}

impl TensorLayout {
    pub fn components(&self) -> usize {
        match *self {
            TensorLayout::Vector(k) => k,
            TensorLayout::Symmetric(m) => m * (m + 1) / 2,
            TensorLayout::Christoffel(m) => m * m * m,
        }
    }

    fn names(&self) -> Vec<String> {
        match *self {
            TensorLayout::Vector(k) => (0..k).map(|c| format!("v{c}")).collect(),
            TensorLayout::Symmetric(m) => {
                let mut out = Vec::new();
                for a in 0..m {
                    for b in a..m {
                        out.push(format!("s{a}{b}"));
                    }
                }
                out
            }
            TensorLayout::Christoffel(m) => {
                let mut out = Vec::new();
                for i in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            out.push(format!("G{i}_{k}{l}"));
                        }
                    }
                }
                out
            }
        }
    }
}

/// Offset of `(a, b)` in a packed symmetric `m × m` matrix.
pub fn sym_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * m - a * (a + 1) / 2 + b
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: SpacetimeGrid,
    layout: TensorLayout,
    values: Vec<f64>,
}

impl TensorField {
    pub fn zeros(grid: &SpacetimeGrid, layout: TensorLayout) -> Self {
        let len = grid.len() * layout.components();
        TensorField {
            grid: grid.clone(),
            layout,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(grid: &SpacetimeGrid, layout: TensorLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * layout.components() {
            return Err(LabError::GridMismatch(format!(
                "{} values for {} nodes × {} components",
                values.len(),
                grid.len(),
                layout.components()
            )));
        }
        Ok(TensorField {
            grid: grid.clone(),
            layout,
            values,
        })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn components(&self) -> usize {
        self.layout.components()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// All components at flat node `idx`.
    pub fn node(&self, idx: usize) -> &[f64] {
        let c = self.components();
        &self.values[idx * c..(idx + 1) * c]
    }

    pub fn node_mut(&mut self, idx: usize) -> &mut [f64] {
        let c = self.components();
        &mut self.values[idx * c..(idx + 1) * c]
    }

    /// Entry `(a, b)` of a symmetric layout at node `idx`.
    pub fn sym(&self, idx: usize, a: usize, b: usize) -> f64 {
        match self.layout {
            TensorLayout::Symmetric(m) => self.node(idx)[sym_index(m, a, b)],
            _ => panic!("sym() on non-symmetric layout"),
        }
    }

    /// `Γ^i_{kl}` of a Christoffel layout at node `idx`.
    pub fn christoffel(&self, idx: usize, i: usize, k: usize, l: usize) -> f64 {
        match self.layout {
            TensorLayout::Christoffel(m) => self.node(idx)[(i * m + k) * m + l],
            _ => panic!("christoffel() on non-Christoffel layout"),
        }
    }

    /// One component as a scalar field.
    pub fn component(&self, c: usize) -> ScalarField {
        let nc = self.components();
        let values = self.values.iter().skip(c).step_by(nc).copied().collect();
        ScalarField::from_values(&self.grid, values).expect("length matches grid")
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let names = self.layout.names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write_csv(out, &self.grid, &refs, &self.values)
    }
}

/// Writes node-major rows `index,k,t,x1..xn,<names…>`.
pub fn write_csv<W: Write>(
    mut out: W,
    grid: &SpacetimeGrid,
    names: &[&str],
    values: &[f64],
) -> Result<()> {
    let nc = names.len();
    if values.len() != grid.len() * nc {
        return Err(LabError::GridMismatch("CSV value count".into()));
    }
    write!(out, "index,k,t")?;
    for a in 1..=grid.n() {
        write!(out, ",x{a}")?;
    }
    for name in names {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    let spatial = grid.spatial_len();
    let positions: Vec<Vec<f64>> = (0..spatial).map(|i| grid.position(i)).collect();
    for k in 0..grid.levels() {
        let t = grid.time(k);
        for (node, x) in positions.iter().enumerate() {
            let idx = k * spatial + node;
            write!(out, "{idx},{k},{}", fmt17(t))?;
            for &xi in x {
                write!(out, ",{}", fmt17(xi))?;
            }
            for v in &values[idx * nc..(idx + 1) * nc] {
                write!(out, ",{}", fmt17(*v))?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Decimal with 17 significant digits (round-trips every `f64`).
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_symmetric_offsets() {
        let m = 3;
        let mut seen = [false; 6];
        for a in 0..m {
            for b in 0..m {
                assert_eq!(sym_index(m, a, b), sym_index(m, b, a));
                seen[sym_index(m, a, b)] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn csv_layout() {
        let g = SpacetimeGrid::unit(1, 4, 0.5, 0.5).unwrap();
        let f = ScalarField::sample(&g, |p| p[0] + p[1]);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "index,k,t,x1,value");
        assert_eq!(lines.len(), 1 + g.len());
        assert!(lines[2].starts_with("1,0,0.0000000000000000e0,3.3333333333333331e-1,"));
        let v: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }

    #[test]
    fn rejects_wrong_length() {
        let g = SpacetimeGrid::unit(1, 4, 0.5, 0.5).unwrap();
        assert!(ScalarField::from_values(&g, vec![0.0; 3]).is_err());
    }
}
