//! Lateral boundary patches `Γ ⊂ Σ = ∂Ω × (0, T)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{Face, Side, SpacetimeGrid};

/// One face of a patch in physical coordinates: closed intervals along each
/// tangential axis, in ascending axis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceSpec {
    pub axis: usize,
    pub side: Side,
    pub ranges: Vec<(f64, f64)>,
}

/// Grid-independent patch description; `time` is an open interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub id: String,
    pub faces: Vec<FaceSpec>,
    pub time: (f64, f64),
}

/// Tangential index ranges (inclusive) of a patch on one face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRange {
    pub face: Face,
    pub ranges: Vec<(usize, usize)>,
}

impl FaceRange {
    /// Spatial axes tangential to the face, ascending.
    pub fn tangential_axes(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|&a| a != self.face.axis).collect()
    }

    fn contains(&self, grid: &SpacetimeGrid, node: usize, margin: usize) -> bool {
        if grid.face_of(node) != Some(self.face) {
            return false;
        }
        let axes = self.tangential_axes(grid.n());
        axes.iter().zip(&self.ranges).all(|(&a, &(lo, hi))| {
            let i = grid.axis_index(node, a);
            i + margin >= lo && i <= hi + margin
        })
    }
}

/// A patch resolved on a grid. Corner nodes never belong to a patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPatch {
    pub id: String,
    pub faces: Vec<FaceRange>,
    /// First and last time level (inclusive) of the open patch.
    pub k0: usize,
    pub k1: usize,
}

impl BoundaryPatch {
    pub fn from_spec(grid: &SpacetimeGrid, spec: &PatchSpec) -> Result<Self> {
        let n = grid.n();
        if spec.faces.is_empty() {
            return Err(LabError::Patch(format!("patch {} has no faces", spec.id)));
        }
        let last = grid.nodes_per_axis() - 1;
        let mut faces = Vec::new();
        for fs in &spec.faces {
            if fs.axis == 0 || fs.axis > n {
                return Err(LabError::Patch(format!(
                    "patch {}: face axis {} outside 1..={n}",
                    spec.id, fs.axis
                )));
            }
            if fs.ranges.len() != n - 1 {
                return Err(LabError::Patch(format!(
                    "patch {}: face x{} needs {} tangential ranges, got {}",
                    spec.id,
                    fs.axis,
                    n - 1,
                    fs.ranges.len()
                )));
            }
            let face = Face::new(fs.axis, fs.side);
            let axes: Vec<usize> = (1..=n).filter(|&a| a != fs.axis).collect();
            let mut ranges = Vec::new();
            for (&a, &(x0, x1)) in axes.iter().zip(&fs.ranges) {
                let lo_coord = grid.coord(a, 0);
                let h = grid.h();
                let lo = ((x0 - lo_coord) / h - 1e-9).ceil().max(1.0) as usize;
                let hi = (((x1 - lo_coord) / h + 1e-9).floor() as isize).min(last as isize - 1);
                if hi < lo as isize {
                    return Err(LabError::Patch(format!(
                        "patch {}: range [{x0}, {x1}] on x{a} holds no non-corner node",
                        spec.id
                    )));
                }
                ranges.push((lo, hi as usize));
            }
            faces.push(FaceRange { face, ranges });
        }
        let (t0, t1) = spec.time;
        let dt = grid.dt();
        let k0 = ((t0 / dt + 1e-9).floor() as isize + 1).max(1) as usize;
        let k1 = ((t1 / dt - 1e-9).ceil() as isize - 1).min(grid.steps() as isize - 1);
        if k1 < k0 as isize {
            return Err(LabError::Patch(format!(
                "patch {}: time window ({t0}, {t1}) holds no interior time level",
                spec.id
            )));
        }
        let patch = BoundaryPatch {
            id: spec.id.clone(),
            faces,
            k0,
            k1: k1 as usize,
        };
        for i in 0..patch.faces.len() {
            for j in i + 1..patch.faces.len() {
                if patch.faces[i].face == patch.faces[j].face {
                    return Err(LabError::Patch(format!(
                        "patch {} lists face {} twice",
                        spec.id,
                        patch.faces[i].face.label()
                    )));
                }
            }
        }
        Ok(patch)
    }

    pub fn contains_node(&self, grid: &SpacetimeGrid, node: usize) -> bool {
        self.faces.iter().any(|f| f.contains(grid, node, 0))
    }

    /// Spatial nodes of the open patch, ascending.
    pub fn nodes(&self, grid: &SpacetimeGrid) -> Vec<usize> {
        (0..grid.spatial_len())
            .filter(|&i| self.contains_node(grid, i))
            .collect()
    }

    /// Spatial nodes of the closed patch: one extra node on each tangential
    /// side, still excluding corners.
    pub fn closed_nodes(&self, grid: &SpacetimeGrid) -> Vec<usize> {
        (0..grid.spatial_len())
            .filter(|&i| self.faces.iter().any(|f| f.contains(grid, i, 1)))
            .collect()
    }

    pub fn steps(&self) -> std::ops::RangeInclusive<usize> {
        self.k0..=self.k1
    }

    /// Time levels of the closed patch.
    pub fn closed_steps(&self, grid: &SpacetimeGrid) -> std::ops::RangeInclusive<usize> {
        self.k0.saturating_sub(1)..=(self.k1 + 1).min(grid.steps())
    }

    /// `(k, node)` pairs of the closed patch.
    pub fn closed_set(&self, grid: &SpacetimeGrid) -> BTreeSet<(usize, usize)> {
        let nodes = self.closed_nodes(grid);
        self.closed_steps(grid)
            .flat_map(|k| nodes.iter().map(move |&i| (k, i)))
            .collect()
    }

    pub fn face_of_node(&self, grid: &SpacetimeGrid, node: usize) -> Option<Face> {
        self.faces
            .iter()
            .find(|f| f.contains(grid, node, 0))
            .map(|f| f.face)
    }

    pub fn descriptor(&self) -> String {
        let faces: Vec<String> = self
            .faces
            .iter()
            .map(|f| format!("{}{:?}", f.face.label(), f.ranges))
            .collect();
        format!("{}:[{}]k{}..{}", self.id, faces.join(","), self.k0, self.k1)
    }
}

/// `Γ₁ ∩ Γ₂ = ∅` on closed node sets, and `Γ₁ ∪ Γ₂ ≠ Σ`: at every interior time
/// level at least one non-corner boundary node lies in neither open patch.
pub fn disjointness_check(grid: &SpacetimeGrid, g1: &BoundaryPatch, g2: &BoundaryPatch) -> bool {
    let c1 = g1.closed_set(grid);
    let c2 = g2.closed_set(grid);
    if c1.intersection(&c2).next().is_some() {
        return false;
    }
    let sigma: Vec<usize> = grid
        .boundary_nodes()
        .into_iter()
        .filter(|&i| !grid.is_corner(i))
        .collect();
    for k in 1..grid.steps() {
        let active: Vec<&BoundaryPatch> = [g1, g2]
            .into_iter()
            .filter(|p| p.steps().contains(&k))
            .collect();
        let covered = sigma
            .iter()
            .all(|&i| active.iter().any(|p| p.contains_node(grid, i)));
        if covered {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpacetimeGrid {
        SpacetimeGrid::unit(2, 33, 3.0, 0.5).unwrap()
    }

    fn face_patch(id: &str, axis: usize, side: Side, range: (f64, f64), time: (f64, f64)) -> PatchSpec {
        PatchSpec {
            id: id.into(),
            faces: vec![FaceSpec {
                axis,
                side,
                ranges: vec![range],
            }],
            time,
        }
    }

    #[test]
    fn resolves_indices() {
        let g = grid();
        let p = BoundaryPatch::from_spec(&g, &face_patch("g", 1, Side::Lower, (0.25, 0.75), (0.2, 2.8))).unwrap();
        assert_eq!(p.faces[0].ranges, vec![(8, 24)]);
        // dt = 1/64: open interval (0.2, 2.8) → levels 13..=179
        assert_eq!((p.k0, p.k1), (13, 179));
        assert_eq!(p.nodes(&g).len(), 17);
        assert_eq!(p.closed_nodes(&g).len(), 19);
    }

    #[test]
    fn full_face_excludes_corners() {
        let g = grid();
        let p = BoundaryPatch::from_spec(&g, &face_patch("g", 2, Side::Upper, (0.0, 1.0), (0.0, 3.0))).unwrap();
        let nodes = p.nodes(&g);
        assert_eq!(nodes.len(), 31);
        assert!(nodes.iter().all(|&i| !g.is_corner(i)));
        assert_eq!((p.k0, p.k1), (1, g.steps() - 1));
    }

    #[test]
    fn rejects_bad_specs() {
        let g = grid();
        assert!(BoundaryPatch::from_spec(&g, &face_patch("g", 3, Side::Lower, (0.2, 0.4), (0.2, 1.0))).is_err());
        assert!(BoundaryPatch::from_spec(&g, &face_patch("g", 1, Side::Lower, (0.2, 0.21), (0.2, 1.0))).is_err());
        assert!(BoundaryPatch::from_spec(&g, &face_patch("g", 1, Side::Lower, (0.2, 0.4), (1.0, 1.01))).is_err());
    }

    #[test]
    fn disjointness_examples() {
        let g = grid();
        let a = BoundaryPatch::from_spec(&g, &face_patch("a", 1, Side::Lower, (0.25, 0.75), (0.2, 2.8))).unwrap();
        let b = BoundaryPatch::from_spec(&g, &face_patch("b", 1, Side::Upper, (0.25, 0.75), (0.2, 2.8))).unwrap();
        assert!(disjointness_check(&g, &a, &b));
        assert!(!disjointness_check(&g, &a, &a));
        let full = |axis, side| FaceSpec {
            axis,
            side,
            ranges: vec![(0.0, 1.0)],
        };
        let cover1 = BoundaryPatch::from_spec(
            &g,
            &PatchSpec {
                id: "c1".into(),
                faces: vec![full(1, Side::Lower), full(1, Side::Upper)],
                time: (0.0, 3.0),
            },
        )
        .unwrap();
        let cover2 = BoundaryPatch::from_spec(
            &g,
            &PatchSpec {
                id: "c2".into(),
                faces: vec![full(2, Side::Lower), full(2, Side::Upper)],
                time: (0.0, 3.0),
            },
        )
        .unwrap();
        // closed sets are disjoint (corners belong to neither) but together they cover Σ
        assert!(!disjointness_check(&g, &cover1, &cover2));
    }
}
