//! Partial-data Dirichlet-to-Neumann matrices
//! `Λ_g^{Γ₁,Γ₂} u₀ = (∂_ν u)|_{Γ₂}` for sources `u₀` supported in `Γ₁`.

pub mod patch;

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::field::fmt17;
use crate::grid::{Face, SpacetimeGrid};
use crate::metric::MetricSpec;
use crate::par;
use crate::solver::{solve, BoundarySource, SolverConfig, Storage, WaveField};

pub use patch::{disjointness_check, BoundaryPatch, FaceRange, FaceSpec, PatchSpec};

/// Centres of `count` equal cells tiling `[lo, hi]` and the cell half-width.
fn tile(lo: f64, hi: f64, count: usize) -> (Vec<f64>, f64) {
    let delta = (hi - lo) / count as f64;
    ((0..count).map(|i| lo + (i as f64 + 0.5) * delta).collect(), 0.5 * delta)
}

/// Tensor basis of bumps on each face of `patch`: `counts` holds one entry
/// per tangential axis (ascending) followed by the time count. Each axis keeps
/// a one-node margin inside the patch; bumps of neighbouring cells touch but
/// do not overlap. Order: face, then tangential cells lexicographically, then
/// time cells.
pub fn make_source_basis(grid: &SpacetimeGrid, patch: &BoundaryPatch, counts: &[usize]) -> Result<Vec<BoundarySource>> {
    let n = grid.n();
    if counts.len() != n {
        return Err(LabError::Source(format!(
            "need {} counts ({} tangential + time), got {}",
            n,
            n - 1,
            counts.len()
        )));
    }
    if counts.contains(&0) {
        return Err(LabError::Source("counts must be ≥ 1".into()));
    }
    let mut basis = Vec::new();
    for range in &patch.faces {
        let axes = range.tangential_axes(n);
        let mut per_axis: Vec<(Vec<f64>, f64)> = Vec::new();
        for ((&a, &(lo, hi)), &count) in axes.iter().zip(&range.ranges).zip(counts) {
            let nodes = hi - lo + 1;
            let (lo_x, hi_x) = (grid.coord(a, lo) + grid.h(), grid.coord(a, hi) - grid.h());
            let (centers, w) = tile(lo_x, hi_x, count);
            if count > nodes || !(2.0 * w >= 2.0 * grid.h()) {
                return Err(LabError::Source(format!(
                    "patch {} too small on x{a}: {nodes} nodes for {count} sources",
                    patch.id
                )));
            }
            per_axis.push((centers, w));
        }
        let steps = patch.k1 - patch.k0 + 1;
        let tc = counts[n - 1];
        let (t_lo, t_hi) = (grid.time(patch.k0) + grid.dt(), grid.time(patch.k1) - grid.dt());
        let (t_centers, tw) = tile(t_lo, t_hi, tc);
        if tc > steps || !(2.0 * tw >= 2.0 * grid.dt()) {
            return Err(LabError::Source(format!(
                "patch {} too short: {steps} steps for {tc} sources",
                patch.id
            )));
        }
        let total: usize = per_axis.iter().map(|(c, _)| c.len()).product();
        for flat in 0..total {
            let mut rem = flat;
            let mut tangential = vec![(0.0, 0.0); per_axis.len()];
            for (d, (centers, w)) in per_axis.iter().enumerate().rev() {
                tangential[d] = (centers[rem % centers.len()], *w);
                rem /= centers.len();
            }
            for &t in &t_centers {
                basis.push(BoundarySource::new(grid, patch, range.face, tangential.clone(), (t, tw), 1.0)?);
            }
        }
    }
    Ok(basis)
}

/// `(k, node)` receiver samples on `patch`: every node, every `stride`-th level.
pub fn receivers(grid: &SpacetimeGrid, patch: &BoundaryPatch, stride: usize) -> Vec<(usize, usize)> {
    let nodes = patch.nodes(grid);
    patch
        .steps()
        .step_by(stride.max(1))
        .flat_map(|k| nodes.iter().map(move |&i| (k, i)))
        .collect()
}

/// Patch nodes and their two inward neighbours, the nodes a normal-derivative
/// trace reads.
pub fn trace_nodes(grid: &SpacetimeGrid, patch: &BoundaryPatch) -> Vec<usize> {
    let mut nodes: Vec<usize> = patch
        .nodes(grid)
        .into_iter()
        .flat_map(|i| {
            let face = patch.face_of_node(grid, i).expect("patch node");
            (0..3).map(move |d| grid.inward(i, face, d))
        })
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Outward `g`-unit normal derivative `(c a)^{−1/2} (3u₀ − 4u₁ + u₂)/(2h)` at a
/// boundary node, `u₁, u₂` the inward neighbours.
pub fn normal_derivative(field: &WaveField, metric: &MetricSpec, face: Face, node: usize, k: usize) -> Result<f64> {
    let grid = field.grid();
    let missing = || LabError::InvalidArgument(format!("node {node} or its inward neighbours not stored"));
    let u0 = field.value(k, node).ok_or_else(missing)?;
    let u1 = field.value(k, grid.inward(node, face, 1)).ok_or_else(missing)?;
    let u2 = field.value(k, grid.inward(node, face, 2)).ok_or_else(missing)?;
    let c = metric.c_node(k, node);
    let a = metric.a_at(&grid.position(node));
    Ok((3.0 * u0 - 4.0 * u1 + u2) / (2.0 * grid.h()) / (c * a).sqrt())
}

/// Normal derivative samples at [`receivers`] of `patch`.
pub fn normal_derivative_trace(
    field: &WaveField,
    metric: &MetricSpec,
    patch: &BoundaryPatch,
    stride: usize,
) -> Result<Vec<f64>> {
    let grid = field.grid();
    if grid != metric.grid() {
        return Err(LabError::GridMismatch("field and metric grids differ".into()));
    }
    receivers(grid, patch, stride)
        .into_iter()
        .map(|(k, node)| {
            let face = patch
                .face_of_node(grid, node)
                .ok_or_else(|| LabError::Patch(format!("node {node} not on the boundary")))?;
            normal_derivative(field, metric, face, node, k)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnConfig {
    pub stride: usize,
    pub memory_cap_bytes: usize,
}

impl Default for DnConfig {
    fn default() -> Self {
        DnConfig {
            stride: 2,
            memory_cap_bytes: SolverConfig::default().memory_cap_bytes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnMetadata {
    pub metric: String,
    pub grid: String,
    pub gamma1: String,
    pub gamma2: String,
    pub basis_hash: String,
    pub stride: usize,
    pub sources: usize,
    pub receivers: usize,
}

/// Receivers × sources, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DnMatrix {
    pub metadata: DnMetadata,
    pub receivers: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn basis_hash(basis: &[BoundarySource]) -> String {
    sha256_hex(&serde_json::to_vec(basis).expect("basis serialises"))
}

impl DnMatrix {
    pub fn rows(&self) -> usize {
        self.receivers.len()
    }

    pub fn cols(&self) -> usize {
        self.metadata.sources
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols() + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, c)).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        crate::field::max_abs(&self.values)
    }

    /// First row `# <metadata json>`, then `k,t,node,s0,…` and one row per receiver.
    pub fn write_csv<W: Write>(&self, grid: &SpacetimeGrid, mut out: W) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(&self.metadata)?)?;
        write!(out, "k,t,node")?;
        for c in 0..self.cols() {
            write!(out, ",s{c}")?;
        }
        writeln!(out)?;
        for (r, &(k, node)) in self.receivers.iter().enumerate() {
            write!(out, "{k},{},{node}", fmt17(grid.time(k)))?;
            for c in 0..self.cols() {
                write!(out, ",{}", fmt17(self.get(r, c)))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// JSON sidecar: metadata plus the hash of the CSV bytes.
    pub fn sidecar(&self, csv: &[u8]) -> serde_json::Value {
        serde_json::json!({
            "metadata": self.metadata,
            "rows": self.rows(),
            "cols": self.cols(),
            "csv_sha256": sha256_hex(csv),
            "frobenius": self.frobenius(),
            "max_abs": self.max_abs(),
        })
    }
}

/// Column `j` is the `Γ₂` normal-derivative trace of the solve driven by
/// `basis[j]`. Columns run in parallel; their order is the basis order.
pub fn assemble_dn_matrix(
    metric: &MetricSpec,
    g1: &BoundaryPatch,
    g2: &BoundaryPatch,
    basis: &[BoundarySource],
    cfg: &DnConfig,
) -> Result<DnMatrix> {
    let grid = metric.grid();
    for (j, s) in basis.iter().enumerate() {
        if s.patch_id != g1.id || !g1.faces.iter().any(|f| f.face == s.face) {
            return Err(LabError::Source(format!("basis source {j} is not supported in {}", g1.id)));
        }
    }
    let rx = receivers(grid, g2, cfg.stride);
    let solver_cfg = SolverConfig {
        storage: Storage::Traces(trace_nodes(grid, g2)),
        memory_cap_bytes: cfg.memory_cap_bytes,
    };
    let columns: Vec<Result<Vec<f64>>> = par::map_indexed(basis.len(), |j| {
        let field = solve(metric, &basis[j], &solver_cfg)?;
        normal_derivative_trace(&field, metric, g2, cfg.stride)
    });
    let cols = basis.len();
    let mut values = vec![0.0; rx.len() * cols];
    for (j, col) in columns.into_iter().enumerate() {
        for (r, v) in col?.into_iter().enumerate() {
            values[r * cols + j] = v;
        }
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(LabError::Integration(format!("non-finite DN entry {v}")));
    }
    Ok(DnMatrix {
        metadata: DnMetadata {
            metric: metric.descriptor(),
            grid: grid.descriptor(),
            gamma1: g1.descriptor(),
            gamma2: g2.descriptor(),
            basis_hash: basis_hash(basis),
            stride: cfg.stride,
            sources: cols,
            receivers: rx.len(),
        },
        receivers: rx,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnComparison {
    /// `‖A − B‖_F / ‖B‖_F` (0 when both vanish).
    pub relative_frobenius: f64,
    pub max_abs_difference: f64,
    /// `max|A − B| / max(max|A|, max|B|)`, symmetric in the arguments.
    pub relative_max: f64,
    /// Per source: `‖a_j − b_j‖ / ‖b_j‖`.
    pub column_differences: Vec<f64>,
    pub reference_frobenius: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Compares two DN matrices that share grid, patches, basis and stride.
pub fn compare_dn(a: &DnMatrix, b: &DnMatrix) -> Result<DnComparison> {
    let (ma, mb) = (&a.metadata, &b.metadata);
    let mismatch = [
        ("grid", ma.grid != mb.grid),
        ("Γ₁", ma.gamma1 != mb.gamma1),
        ("Γ₂", ma.gamma2 != mb.gamma2),
        ("basis", ma.basis_hash != mb.basis_hash),
        ("stride", ma.stride != mb.stride),
        ("shape", a.values.len() != b.values.len()),
    ];
    if let Some((what, _)) = mismatch.iter().find(|(_, bad)| *bad) {
        return Err(LabError::Metadata(format!("refusing to compare DN matrices: {what} differs")));
    }
    let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let frob = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let max_diff = crate::field::max_abs(&diff);
    let column_differences = (0..a.cols())
        .map(|c| {
            let (ca, cb) = (a.column(c), b.column(c));
            let d: Vec<f64> = ca.iter().zip(&cb).map(|(x, y)| x - y).collect();
            ratio(frob(&d), frob(&cb))
        })
        .collect();
    Ok(DnComparison {
        relative_frobenius: ratio(frob(&diff), b.frobenius()),
        max_abs_difference: max_diff,
        relative_max: ratio(max_diff, a.max_abs().max(b.max_abs())),
        column_differences,
        reference_frobenius: b.frobenius(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::Side;

    fn patch(g: &SpacetimeGrid, side: Side) -> BoundaryPatch {
        BoundaryPatch::from_spec(
            g,
            &PatchSpec {
                id: "g".into(),
                faces: vec![FaceSpec {
                    axis: 1,
                    side,
                    ranges: vec![(0.0, 1.0)],
                }],
                time: (0.0, 1.0),
            },
        )
        .unwrap()
    }

    #[test]
    fn basis_counts() {
        // a face of 33 nodes and 64 steps
        let g = SpacetimeGrid::unit(2, 33, 1.0, 0.5).unwrap();
        let p = patch(&g, Side::Lower);
        let b = make_source_basis(&g, &p, &[4, 2]).unwrap();
        assert_eq!(b.len(), 8);
        let centers: Vec<(f64, f64)> = b.iter().map(|s| (s.tangential[0].0, s.temporal.0)).collect();
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                assert_ne!(centers[i], centers[j]);
            }
        }
        let single = make_source_basis(&g, &p, &[1, 1]).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single[0].tangential[0].0 - 0.5).abs() < 1e-12);
        assert!(make_source_basis(&g, &p, &[40, 1]).is_err());
        assert!(make_source_basis(&g, &p, &[1]).is_err());
    }

    #[test]
    fn linear_field_has_unit_normal_derivative() {
        let g = SpacetimeGrid::unit(2, 9, 0.5, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let u = WaveField::from_full(ScalarField::sample(&g, |p| p[1]));
        let upper = patch(&g, Side::Upper);
        let tr = normal_derivative_trace(&u, &eta, &upper, 1).unwrap();
        assert!(tr.iter().all(|v| (v - 1.0).abs() < 1e-12));
        // outward normal on x¹ = 0 points along −x¹
        let lower = patch(&g, Side::Lower);
        let tr = normal_derivative_trace(&u, &eta, &lower, 1).unwrap();
        assert!(tr.iter().all(|v| (v + 1.0).abs() < 1e-12));
        let zero = WaveField::from_full(ScalarField::zeros(&g));
        assert!(normal_derivative_trace(&zero, &eta, &upper, 2).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn metadata_mismatch_is_refused() {
        let g = SpacetimeGrid::unit(2, 17, 1.0, 0.5).unwrap();
        let eta = MetricSpec::minkowski(&g);
        let p = patch(&g, Side::Lower);
        let basis = make_source_basis(&g, &p, &[2, 1]).unwrap();
        let a = assemble_dn_matrix(&eta, &p, &p, &basis, &DnConfig::default()).unwrap();
        let same = compare_dn(&a, &a).unwrap();
        assert_eq!(same.relative_frobenius, 0.0);
        assert_eq!(same.max_abs_difference, 0.0);
        let b = assemble_dn_matrix(&eta, &p, &p, &basis[..1], &DnConfig::default()).unwrap();
        assert!(matches!(compare_dn(&a, &b), Err(LabError::Metadata(_))));
    }
}
