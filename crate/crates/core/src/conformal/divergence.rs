//! Conformal scaling of general divergence-form operators
//!
//! ```text
//! (P_C u)_j = Σ_{a,b,c} ∂_a(C_{jabc} ∂_b u_c),     (P_C f)_{jc} = Σ_{a,b} ∂_a(C_{jabc} ∂_b f),
//! P_{f²C}(f⁻¹u)_j = f (P_C u)_j − Σ_c u_c (P_C f)_{jc}     when C_{jabc} = C_{jbac}.
//! ```
//!
//! Derivatives are nested first differences `D_a(C D_b ·)` along all
//! space-time axes (central inside, one-sided second order on the skin).

use crate::error::{LabError, Result};
use crate::field::{ScalarField, TensorField, TensorLayout};
use crate::grid::SpacetimeGrid;
use crate::par;
use crate::stencil;

/// `C_{jabc}` at every node, `j < l`, `a, b < m`, `c < k`.
#[derive(Debug, Clone)]
pub struct CoefficientArray {
    grid: SpacetimeGrid,
    l: usize,
    k: usize,
    values: Vec<f64>,
}

/// Tolerance of the `a ↔ b` symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;

impl CoefficientArray {
    /// Samples `coeff(p, j, a, b, c)`; rejects coefficients that are not
    /// symmetric in `a, b`.
    pub fn from_fn(
        grid: &SpacetimeGrid,
        l: usize,
        k: usize,
        coeff: impl Fn(&[f64], usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        if l == 0 || k == 0 {
            return Err(LabError::Dimension("l and k must be ≥ 1".into()));
        }
        let m = grid.m();
        let per = l * m * m * k;
        let mut values = vec![0.0; grid.len() * per];
        crate::field::for_each_point(grid, |idx, p| {
            let out = &mut values[idx * per..(idx + 1) * per];
            for j in 0..l {
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..k {
                            out[((j * m + a) * m + b) * k + c] = coeff(p, j, a, b, c);
                        }
                    }
                }
            }
        });
        let array = CoefficientArray {
            grid: grid.clone(),
            l,
            k,
            values,
        };
        array.check_symmetric()?;
        Ok(array)
    }

    fn check_symmetric(&self) -> Result<()> {
        let m = self.grid.m();
        for idx in 0..self.grid.len() {
            for j in 0..self.l {
                for a in 0..m {
                    for b in a + 1..m {
                        for c in 0..self.k {
                            let x = self.get(idx, j, a, b, c);
                            let y = self.get(idx, j, b, a, c);
                            if (x - y).abs() > SYMMETRY_TOL * (1.0 + x.abs().max(y.abs())) {
                                return Err(LabError::InvalidArgument(format!(
                                    "C not symmetric in (a, b): C[{j}{a}{b}{c}] = {x}, C[{j}{b}{a}{c}] = {y} at node {idx}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, idx: usize, j: usize, a: usize, b: usize, c: usize) -> f64 {
        let m = self.grid.m();
        let per = self.l * m * m * self.k;
        self.values[idx * per + ((j * m + a) * m + b) * self.k + c]
    }
}

/// `Σ_a D_a(Σ_{b,c} s·C_{jabc} D_b u_c)` for each output `j < l`, with
/// `coeff(idx, j, a, b, c)` returning `s·C` at node `idx`.
fn apply(
    grid: &SpacetimeGrid,
    l: usize,
    coeff: impl Fn(usize, usize, usize, usize, usize) -> f64 + Sync,
    u: &[&[f64]],
) -> Vec<Vec<f64>> {
    let m = grid.m();
    let grads: Vec<Vec<Vec<f64>>> = u
        .iter()
        .map(|uc| {
            (0..m)
                .map(|b| par::map_indexed(grid.len(), |i| stencil::d1(grid, b, i, |j| uc[j])))
                .collect()
        })
        .collect();
    (0..l)
        .map(|j| {
            let flux: Vec<Vec<f64>> = (0..m)
                .map(|a| {
                    par::map_indexed(grid.len(), |i| {
                        let mut s = 0.0;
                        for b in 0..m {
                            for (c, gc) in grads.iter().enumerate() {
                                s += coeff(i, j, a, b, c) * gc[b][i];
                            }
                        }
                        s
                    })
                })
                .collect();
            par::map_indexed(grid.len(), |i| {
                (0..m).map(|a| stencil::d1(grid, a, i, |n| flux[a][n])).sum()
            })
        })
        .collect()
}

/// `(P_C u)_j` for a `k`-vector field `u`.
pub fn apply_operator(c: &CoefficientArray, u: &TensorField) -> Result<TensorField> {
    check_vector(c, u)?;
    let comps = split(u);
    let refs: Vec<&[f64]> = comps.iter().map(Vec::as_slice).collect();
    let out = apply(&c.grid, c.l, |i, j, a, b, cc| c.get(i, j, a, b, cc), &refs);
    join(&c.grid, out)
}

fn check_vector(c: &CoefficientArray, u: &TensorField) -> Result<()> {
    if u.grid() != &c.grid {
        return Err(LabError::GridMismatch("u and C live on different grids".into()));
    }
    if u.layout() != &TensorLayout::Vector(c.k) {
        return Err(LabError::Dimension(format!(
            "u must have {} components, layout is {:?}",
            c.k,
            u.layout()
        )));
    }
    Ok(())
}

fn split(u: &TensorField) -> Vec<Vec<f64>> {
    (0..u.components()).map(|c| u.component(c).into_values()).collect()
}

fn join(grid: &SpacetimeGrid, comps: Vec<Vec<f64>>) -> Result<TensorField> {
    let nc = comps.len();
    let mut values = vec![0.0; grid.len() * nc];
    for (c, comp) in comps.iter().enumerate() {
        for (i, v) in comp.iter().enumerate() {
            values[i * nc + c] = *v;
        }
    }
    TensorField::from_values(grid, TensorLayout::Vector(nc), values)
}

/// `P_{f²C}(f⁻¹u)_j − f (P_C u)_j + Σ_c u_c (P_C f)_{jc}`.
pub fn divergence_form_identity_residual(c: &CoefficientArray, f: &ScalarField, u: &TensorField) -> Result<TensorField> {
    check_vector(c, u)?;
    if f.grid() != &c.grid {
        return Err(LabError::GridMismatch("f and C live on different grids".into()));
    }
    if let Some(idx) = f.values().iter().position(|&v| !(v > 0.0)) {
        return Err(LabError::NonPositive {
            what: "f",
            value: f.values()[idx],
            node: idx,
        });
    }
    let grid = &c.grid;
    let (l, k) = (c.l, c.k);
    let fv = f.values();
    let comps = split(u);
    let refs: Vec<&[f64]> = comps.iter().map(Vec::as_slice).collect();
    let scaled_u: Vec<Vec<f64>> = comps
        .iter()
        .map(|uc| uc.iter().zip(fv).map(|(a, b)| a / b).collect())
        .collect();
    let scaled_refs: Vec<&[f64]> = scaled_u.iter().map(Vec::as_slice).collect();
    let lhs = apply(grid, l, |i, j, a, b, cc| fv[i] * fv[i] * c.get(i, j, a, b, cc), &scaled_refs);
    let pcu = apply(grid, l, |i, j, a, b, cc| c.get(i, j, a, b, cc), &refs);
    // (P_C f)_{jc}: one output per (j, c), acting on the single field f
    let pcf = apply(grid, l * k, |i, jc, a, b, _| c.get(i, jc / k, a, b, jc % k), &[fv]);
    let out: Vec<Vec<f64>> = (0..l)
        .map(|j| {
            (0..grid.len())
                .map(|i| {
                    let coupling: f64 = (0..k).map(|cc| comps[cc][i] * pcf[j * k + cc][i]).sum();
                    lhs[j][i] - fv[i] * pcu[j][i] + coupling
                })
                .collect()
        })
        .collect();
    join(grid, out)
}
