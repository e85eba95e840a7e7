//! Uniform space-time lattice over `Ω̄ × [0, T]` with `Ω` an axis-aligned box.
//!
//! Coordinate index 0 is time; indices `1..=n` are spatial. Nodes are
//! numbered row-major: the flat index of node `(k, i_1, …, i_n)` is
//! `k·Nⁿ + i_1·Nⁿ⁻¹ + … + i_n`, i.e. time is slowest and the last spatial
//! axis is fastest.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Largest Courant factor accepted by a grid.
pub const MAX_CFL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// One face `{x^axis = lower}` or `{x^axis = upper}` of the spatial box.
/// `axis` uses the space-time convention, so it lies in `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn new(axis: usize, side: Side) -> Self {
        Face { axis, side }
    }

    /// Sign of the outward normal along `axis`.
    pub fn outward_sign(&self) -> f64 {
        match self.side {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        }
    }

    pub fn label(&self) -> String {
        let s = match self.side {
            Side::Lower => '-',
            Side::Upper => '+',
        };
        format!("x{}{}", self.axis, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid {
    n: usize,
    lower: Vec<f64>,
    length: f64,
    nodes: usize,
    h: f64,
    t_final: f64,
    dt: f64,
    cfl: f64,
    steps: usize,
}

impl SpacetimeGrid {
    /// Builds a grid over `Π [lo_d, hi_d] × [0, t_final]` with `nodes` nodes per
    /// spatial axis and `dt = cfl·h`. All axes must share the same length so the
    /// spacing is uniform, and `t_final/dt` must be an integer.
    pub fn new(extent: &[(f64, f64)], nodes: usize, t_final: f64, cfl: f64) -> Result<Self> {
        let n = extent.len();
        if n == 0 {
            return Err(LabError::InvalidGrid("spatial dimension must be ≥ 1".into()));
        }
        if nodes < 4 {
            return Err(LabError::InvalidGrid(format!(
                "need at least 4 nodes per axis, got {nodes}"
            )));
        }
        let length = extent[0].1 - extent[0].0;
        if !(length > 0.0) {
            return Err(LabError::InvalidGrid(format!("empty extent {:?}", extent[0])));
        }
        for &(lo, hi) in extent {
            if ((hi - lo) - length).abs() > 1e-12 * length {
                return Err(LabError::InvalidGrid(
                    "all spatial axes must have the same length".into(),
                ));
            }
        }
        if !(cfl > 0.0 && cfl <= MAX_CFL) {
            return Err(LabError::InvalidGrid(format!(
                "cfl must lie in (0, {MAX_CFL}], got {cfl}"
            )));
        }
        if !(t_final > 0.0) {
            return Err(LabError::InvalidGrid(format!("T must be positive, got {t_final}")));
        }
        let h = length / (nodes - 1) as f64;
        let dt = cfl * h;
        let ratio = t_final / dt;
        let steps = ratio.round();
        if steps < 3.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(LabError::InvalidGrid(format!(
                "T/dt = {ratio} is not an integer ≥ 3 (T = {t_final}, dt = {dt})"
            )));
        }
        Ok(SpacetimeGrid {
            n,
            lower: extent.iter().map(|e| e.0).collect(),
            length,
            nodes,
            h,
            t_final,
            dt,
            cfl,
            steps: steps as usize,
        })
    }

    /// Unit box `[0,1]ⁿ × [0, t_final]`.
    pub fn unit(n: usize, nodes: usize, t_final: f64, cfl: f64) -> Result<Self> {
        Self::new(&vec![(0.0, 1.0); n], nodes, t_final, cfl)
    }

    /// Same domain, spacing halved (`2N − 1` nodes, twice the steps).
    pub fn refined(&self) -> Result<Self> {
        Self::new(&self.extent(), 2 * self.nodes - 1, self.t_final, self.cfl)
    }

    /// Node count per axis at refinement `level` of a base lattice.
    pub fn nodes_at_level(base_nodes: usize, level: u32) -> usize {
        (base_nodes - 1) * (1usize << level) + 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Space-time dimension `m = n + 1`.
    pub fn m(&self) -> usize {
        self.n + 1
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn levels(&self) -> usize {
        self.steps + 1
    }

    pub fn extent(&self) -> Vec<(f64, f64)> {
        self.lower.iter().map(|&lo| (lo, lo + self.length)).collect()
    }

    pub fn lower_corner(&self) -> &[f64] {
        &self.lower
    }

    pub fn side_length(&self) -> f64 {
        self.length
    }

    /// Nodes per time level, `Nⁿ`.
    pub fn spatial_len(&self) -> usize {
        self.nodes.pow(self.n as u32)
    }

    /// Total space-time node count.
    pub fn len(&self) -> usize {
        self.levels() * self.spatial_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_final
        } else {
            k as f64 * self.dt
        }
    }

    /// Spacing along space-time axis `a` (0 = time).
    pub fn spacing(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.dt
        } else {
            self.h
        }
    }

    /// Coordinate of index `i` along spatial axis `axis ∈ 1..=n`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let lo = self.lower[axis - 1];
        if i == self.nodes - 1 {
            lo + self.length
        } else {
            lo + i as f64 * self.h
        }
    }

    /// Flat-index stride of spatial axis `axis ∈ 1..=n` within one time level.
    pub fn spatial_stride(&self, axis: usize) -> usize {
        self.nodes.pow((self.n - axis) as u32)
    }

    /// Flat-index stride of space-time axis `a` (0 = time) in a space-time field.
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            self.spatial_len()
        } else {
            self.spatial_stride(axis)
        }
    }

    /// Index along `axis ∈ 1..=n` of spatial node `node`.
    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.spatial_stride(axis)) % self.nodes
    }

    /// Spatial multi-index `(i_1, …, i_n)` of `node`.
    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        (1..=self.n).map(|a| self.axis_index(node, a)).collect()
    }

    pub fn spatial_index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.nodes + i)
    }

    /// Spatial coordinates of `node`.
    pub fn position(&self, node: usize) -> Vec<f64> {
        (1..=self.n).map(|a| self.coord(a, self.axis_index(node, a))).collect()
    }

    /// Space-time point `(t_k, x_node)`.
    pub fn point(&self, k: usize, node: usize) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.m());
        p.push(self.time(k));
        p.extend(self.position(node));
        p
    }

    /// Index along space-time axis `a` of flat space-time index `idx`.
    pub fn spacetime_axis_index(&self, idx: usize, axis: usize) -> usize {
        if axis == 0 {
            idx / self.spatial_len()
        } else {
            self.axis_index(idx % self.spatial_len(), axis)
        }
    }

    /// Extent (node count) along space-time axis `a`.
    pub fn axis_len(&self, axis: usize) -> usize {
        if axis == 0 {
            self.levels()
        } else {
            self.nodes
        }
    }

    /// Number of spatial coordinates of `node` lying on the box boundary.
    pub fn boundary_multiplicity(&self, node: usize) -> usize {
        (1..=self.n)
            .filter(|&a| {
                let i = self.axis_index(node, a);
                i == 0 || i == self.nodes - 1
            })
            .count()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary_multiplicity(node) > 0
    }

    /// Corner nodes lie on two or more faces; they belong to no boundary patch.
    pub fn is_corner(&self, node: usize) -> bool {
        self.boundary_multiplicity(node) > 1
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.boundary_multiplicity(node) == 0
    }

    pub fn faces(&self) -> Vec<Face> {
        (1..=self.n)
            .flat_map(|a| [Face::new(a, Side::Lower), Face::new(a, Side::Upper)])
            .collect()
    }

    /// Face owning a non-corner boundary node.
    pub fn face_of(&self, node: usize) -> Option<Face> {
        if self.boundary_multiplicity(node) != 1 {
            return None;
        }
        (1..=self.n).find_map(|a| {
            let i = self.axis_index(node, a);
            if i == 0 {
                Some(Face::new(a, Side::Lower))
            } else if i == self.nodes - 1 {
                Some(Face::new(a, Side::Upper))
            } else {
                None
            }
        })
    }

    /// Index along the face axis for the face's own layer.
    pub fn face_layer(&self, face: Face) -> usize {
        match face.side {
            Side::Lower => 0,
            Side::Upper => self.nodes - 1,
        }
    }

    /// Spatial node reached from `node` by moving `depth` nodes inward from `face`.
    pub fn inward(&self, node: usize, face: Face, depth: usize) -> usize {
        let stride = self.spatial_stride(face.axis);
        match face.side {
            Side::Lower => node + depth * stride,
            Side::Upper => node - depth * stride,
        }
    }

    /// All boundary nodes of one time level (corners included), ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.spatial_len()).filter(|&i| self.is_boundary(i)).collect()
    }

    /// Interior nodes of one time level, ascending.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.spatial_len()).filter(|&i| self.is_interior(i)).collect()
    }

    /// Short identifier used in metadata and hashes.
    pub fn descriptor(&self) -> String {
        format!(
            "n={} N={} lower={:?} L={} T={} cfl={} steps={}",
            self.n, self.nodes, self.lower, self.length, self.t_final, self.cfl, self.steps
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_steps() {
        let g = SpacetimeGrid::unit(2, 65, 3.0, 0.5).unwrap();
        assert_eq!(g.h(), 1.0 / 64.0);
        assert_eq!(g.dt(), 1.0 / 128.0);
        assert_eq!(g.steps(), 384);
        assert_eq!(g.time(g.steps()), 3.0);
        let r = g.refined().unwrap();
        assert_eq!(r.nodes_per_axis(), 129);
        assert_eq!(r.steps(), 768);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpacetimeGrid::unit(2, 65, 3.0, 0.95).is_err());
        assert!(SpacetimeGrid::unit(2, 65, 3.0, 0.0).is_err());
        // T/dt = 3.3/ (0.5/64) is not an integer
        assert!(SpacetimeGrid::unit(2, 65, 3.3001, 0.5).is_err());
        assert!(SpacetimeGrid::new(&[(0.0, 1.0), (0.0, 2.0)], 9, 1.0, 0.5).is_err());
        assert!(SpacetimeGrid::unit(2, 3, 1.0, 0.5).is_err());
    }

    #[test]
    fn indexing_round_trip() {
        let g = SpacetimeGrid::unit(3, 5, 1.0, 0.5).unwrap();
        for node in 0..g.spatial_len() {
            assert_eq!(g.spatial_index(&g.multi_index(node)), node);
        }
        assert_eq!(g.spatial_stride(1), 25);
        assert_eq!(g.spatial_stride(3), 1);
        assert_eq!(g.position(g.spatial_index(&[4, 0, 2])), vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn boundary_partition() {
        let g = SpacetimeGrid::unit(2, 6, 1.0, 0.5).unwrap();
        let boundary = g.boundary_nodes();
        let corners: Vec<_> = boundary.iter().copied().filter(|&i| g.is_corner(i)).collect();
        assert_eq!(boundary.len(), 4 * 6 - 4);
        assert_eq!(corners.len(), 4);
        // every non-corner boundary node belongs to exactly one face
        for &i in &boundary {
            assert_eq!(g.face_of(i).is_some(), !g.is_corner(i));
        }
        assert_eq!(g.interior_nodes().len(), 16);
    }

    #[test]
    fn inward_steps() {
        let g = SpacetimeGrid::unit(2, 6, 1.0, 0.5).unwrap();
        let node = g.spatial_index(&[5, 2]);
        let face = g.face_of(node).unwrap();
        assert_eq!(face, Face::new(1, Side::Upper));
        assert_eq!(g.multi_index(g.inward(node, face, 2)), vec![3, 2]);
    }
}
