//! Dirichlet data on the lateral boundary.

use serde::{Deserialize, Serialize};

use crate::conformal::bump::BumpProfile;
use crate::dn::patch::BoundaryPatch;
use crate::error::{LabError, Result};
use crate::grid::{Face, SpacetimeGrid};

/// Lateral boundary values `u₀(node, t_k)`; only consulted at boundary nodes.
pub trait BoundaryData: Sync {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64;
}

impl<T: BoundaryData + ?Sized> BoundaryData for &T {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64 {
        (**self).value(grid, node, k)
    }
}

/// `u₀ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroData;

impl BoundaryData for ZeroData {
    fn value(&self, _: &SpacetimeGrid, _: usize, _: usize) -> f64 {
        0.0
    }
}

/// Boundary data given by a closure of `(grid, node, k)`.
pub struct FnData<F>(pub F);

impl<F: Fn(&SpacetimeGrid, usize, usize) -> f64 + Sync> BoundaryData for FnData<F> {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64 {
        (self.0)(grid, node, k)
    }
}

/// Separable bump on one face: `amplitude · Π bᵢ(x_tan,i) · b(t)` with each
/// factor a mollifier normalised to peak 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySource {
    pub patch_id: String,
    pub face: Face,
    /// `(center, half-width)` per tangential axis, ascending axis order.
    pub tangential: Vec<(f64, f64)>,
    pub temporal: (f64, f64),
    pub amplitude: f64,
}

fn unit_bump(center: f64, half_width: f64) -> Result<BumpProfile> {
    BumpProfile::new(std::f64::consts::E, half_width, center)
}

impl BoundarySource {
    /// Validates that the support lies inside the open patch with one node of
    /// margin and stays one step away from `t = 0` and `t = T`.
    pub fn new(
        grid: &SpacetimeGrid,
        patch: &BoundaryPatch,
        face: Face,
        tangential: Vec<(f64, f64)>,
        temporal: (f64, f64),
        amplitude: f64,
    ) -> Result<Self> {
        let range = patch
            .faces
            .iter()
            .find(|f| f.face == face)
            .ok_or_else(|| LabError::Source(format!("face {} not in patch {}", face.label(), patch.id)))?;
        let axes = range.tangential_axes(grid.n());
        if tangential.len() != axes.len() {
            return Err(LabError::Source(format!(
                "expected {} tangential profiles, got {}",
                axes.len(),
                tangential.len()
            )));
        }
        if !amplitude.is_finite() {
            return Err(LabError::Source(format!("amplitude {amplitude}")));
        }
        let tol = 1e-9 * grid.h();
        for ((&a, &(lo, hi)), &(c, w)) in axes.iter().zip(&range.ranges).zip(&tangential) {
            unit_bump(c, w)?;
            let inner_lo = grid.coord(a, lo) + grid.h();
            let inner_hi = grid.coord(a, hi) - grid.h();
            if c - w < inner_lo - tol || c + w > inner_hi + tol {
                return Err(LabError::Source(format!(
                    "support [{}, {}] on x{a} touches the edge of patch {} (usable [{inner_lo}, {inner_hi}])",
                    c - w,
                    c + w,
                    patch.id
                )));
            }
        }
        let (tc, tw) = temporal;
        unit_bump(tc, tw)?;
        let t_lo = grid.time(patch.k0) + grid.dt();
        let t_hi = grid.time(patch.k1) - grid.dt();
        let ttol = 1e-9 * grid.dt();
        if tc - tw < t_lo - ttol || tc + tw > t_hi + ttol {
            return Err(LabError::Source(format!(
                "time support [{}, {}] leaves the window of patch {} (usable [{t_lo}, {t_hi}])",
                tc - tw,
                tc + tw,
                patch.id
            )));
        }
        Ok(BoundarySource {
            patch_id: patch.id.clone(),
            face,
            tangential,
            temporal,
            amplitude,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        BoundarySource {
            amplitude: self.amplitude * s,
            ..self.clone()
        }
    }

    /// `(t_start, t_end)` of the time support.
    pub fn time_support(&self) -> (f64, f64) {
        (self.temporal.0 - self.temporal.1, self.temporal.0 + self.temporal.1)
    }

    fn profile_at(&self, grid: &SpacetimeGrid, node: usize, t: f64) -> f64 {
        if self.amplitude == 0.0 || grid.face_of(node) != Some(self.face) {
            return 0.0;
        }
        let (tc, tw) = self.temporal;
        let mut v = self.amplitude * bump(tc, tw, t);
        if v == 0.0 {
            return 0.0;
        }
        let axes = (1..=grid.n()).filter(|&a| a != self.face.axis);
        for (a, &(c, w)) in axes.zip(&self.tangential) {
            v *= bump(c, w, grid.coord(a, grid.axis_index(node, a)));
        }
        v
    }
}

fn bump(center: f64, half_width: f64, s: f64) -> f64 {
    let z = (s - center) / half_width;
    if z.abs() >= 1.0 {
        0.0
    } else {
        (1.0 + 1.0 / (z * z - 1.0)).exp()
    }
}

impl BoundaryData for BoundarySource {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64 {
        self.profile_at(grid, node, grid.time(k))
    }
}

/// `Σ αᵢ sᵢ`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Superposition(pub Vec<(f64, BoundarySource)>);

impl BoundaryData for Superposition {
    fn value(&self, grid: &SpacetimeGrid, node: usize, k: usize) -> f64 {
        self.0.iter().map(|(a, s)| a * s.value(grid, node, k)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dn::patch::{FaceSpec, PatchSpec};
    use crate::grid::Side;

    fn setup() -> (SpacetimeGrid, BoundaryPatch) {
        let g = SpacetimeGrid::unit(2, 33, 3.0, 0.5).unwrap();
        let spec = PatchSpec {
            id: "g".into(),
            faces: vec![FaceSpec {
                axis: 1,
                side: Side::Lower,
                ranges: vec![(0.25, 0.75)],
            }],
            time: (0.2, 2.8),
        };
        let p = BoundaryPatch::from_spec(&g, &spec).unwrap();
        (g, p)
    }

    #[test]
    fn peak_is_amplitude() {
        let (g, p) = setup();
        let face = Face::new(1, Side::Lower);
        let s = BoundarySource::new(&g, &p, face, vec![(0.5, 0.2)], (1.5, 0.5), 2.0).unwrap();
        let node = g.spatial_index(&[0, 16]);
        let k = (1.5 / g.dt()).round() as usize;
        assert!((s.value(&g, node, k) - 2.0).abs() < 1e-12);
        // other faces and the corner carry nothing
        assert_eq!(s.value(&g, g.spatial_index(&[32, 16]), k), 0.0);
        assert_eq!(s.value(&g, 0, k), 0.0);
        assert_eq!(s.value(&g, node, 0), 0.0);
    }

    #[test]
    fn support_must_stay_inside() {
        let (g, p) = setup();
        let face = Face::new(1, Side::Lower);
        assert!(BoundarySource::new(&g, &p, face, vec![(0.5, 0.26)], (1.5, 0.5), 1.0).is_err());
        assert!(BoundarySource::new(&g, &p, face, vec![(0.5, 0.2)], (0.5, 0.35), 1.0).is_err());
        assert!(BoundarySource::new(&g, &p, Face::new(2, Side::Lower), vec![(0.5, 0.2)], (1.5, 0.5), 1.0).is_err());
    }
}
