//! Browser front end: DN comparison of Minkowski against a plane-wave
//! conformal rescaling, an animated forward solve, and the Hessian
//! certificate, on grids small enough to run interactively.

use conflab::conformal::bump::BumpProfile;
use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::conformal::{factor_field, scale_metric, support_clearance_check};
use conflab::dn::patch::{FaceSpec, PatchSpec};
use conflab::dn::{assemble_dn_matrix, compare_dn, make_source_basis, BoundaryPatch, DnConfig};
use conflab::rigidity::{nonisometry_certificate, Verdict};
use conflab::solver::{solve, SolverConfig};
use conflab::{Factor, MetricSpec, Side, SpacetimeGrid};
use serde_json::json;
use wasm_bindgen::prelude::*;

const T_FINAL: f64 = 3.0;
const CFL: f64 = 0.5;
const MAX_NODES: usize = 65;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(nodes: usize) -> Result<SpacetimeGrid, JsError> {
    if !(9..=MAX_NODES).contains(&nodes) {
        return Err(JsError::new(&format!("nodes must lie in 9..={MAX_NODES}")));
    }
    SpacetimeGrid::unit(2, nodes, T_FINAL, CFL).map_err(js)
}

/// Slab `|(x − x₀)·θ − (t − t₀)| < w` travelling in direction θ.
fn factor(theta: f64, t0: f64, amplitude: f64, width: f64) -> Result<PlaneWaveFactor, JsError> {
    let profile = BumpProfile::new(amplitude, width, 0.0).map_err(js)?;
    PlaneWaveFactor::new(vec![theta, 0.0], vec![0.5, 0.5], t0, profile).map_err(js)
}

/// Γ on the face `x¹ = 0`.
fn gamma(g: &SpacetimeGrid) -> Result<BoundaryPatch, JsError> {
    let spec = PatchSpec {
        id: "gamma".into(),
        faces: vec![FaceSpec {
            axis: 1,
            side: Side::Lower,
            ranges: vec![(0.25, 0.75)],
        }],
        time: (0.2, 2.8),
    };
    BoundaryPatch::from_spec(g, &spec).map_err(js)
}

/// Compares `Λ_η` with `Λ_{f²η}` on Γ for a slab moving away from Γ
/// (`toward_gamma = false`) or across it. Returns a JSON object.
#[wasm_bindgen]
pub fn dn_comparison(nodes: usize, amplitude: f64, width: f64, toward_gamma: bool) -> Result<String, JsError> {
    let g = grid(nodes)?;
    let f = if toward_gamma {
        factor(1.0, 1.5, amplitude, width)?
    } else {
        factor(-1.0, 2.6, amplitude, width)?
    };
    let patch = gamma(&g)?;
    let clearance = support_clearance_check(&f, &patch, &g, None);
    let eta = MetricSpec::minkowski(&g);
    let scaled = scale_metric(&eta, f.into()).map_err(js)?;
    let basis = make_source_basis(&g, &patch, &[3, 2]).map_err(js)?;
    let cfg = DnConfig {
        stride: 2,
        memory_cap_bytes: 256 << 20,
    };
    let a = assemble_dn_matrix(&eta, &patch, &patch, &basis, &cfg).map_err(js)?;
    let b = assemble_dn_matrix(&scaled, &patch, &patch, &basis, &cfg).map_err(js)?;
    let cmp = compare_dn(&b, &a).map_err(js)?;
    Ok(json!({
        "nodes": nodes,
        "sources": basis.len(),
        "receivers": a.rows(),
        "relative_frobenius": cmp.relative_frobenius,
        "max_abs_difference": cmp.max_abs_difference,
        "clearance_passed": clearance.passed,
        "clearance_margin": clearance.margin,
    })
    .to_string())
}

/// Full space-time solution of one boundary source, for playback.
#[wasm_bindgen]
pub struct WaveMovie {
    nodes: usize,
    levels: usize,
    dt: f64,
    u: Vec<f64>,
    f: Vec<f64>,
}

#[wasm_bindgen]
impl WaveMovie {
    /// Solves with the first basis source on Γ, on Minkowski (`scaled = false`)
    /// or on the rescaled metric.
    #[wasm_bindgen(constructor)]
    pub fn new(nodes: usize, amplitude: f64, width: f64, scaled: bool) -> Result<WaveMovie, JsError> {
        let g = grid(nodes)?;
        let pw: Factor = factor(-1.0, 2.6, amplitude, width)?.into();
        let eta = MetricSpec::minkowski(&g);
        let metric = if scaled {
            scale_metric(&eta, pw.clone()).map_err(js)?
        } else {
            eta
        };
        let src = make_source_basis(&g, &gamma(&g)?, &[1, 1]).map_err(js)?.remove(0);
        let u = solve(&metric, &src, &SolverConfig::default())
            .map_err(js)?
            .into_full()
            .expect("default storage is full");
        Ok(WaveMovie {
            nodes,
            levels: g.levels(),
            dt: g.dt(),
            u: u.into_values(),
            f: factor_field(&g, &pw).map_err(js)?.into_values(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// `u` at level `k`, row-major with `x¹` fastest.
    pub fn frame(&self, k: usize) -> Vec<f64> {
        self.level(&self.u, k)
    }

    /// Conformal factor `f` at level `k`.
    pub fn factor_frame(&self, k: usize) -> Vec<f64> {
        self.level(&self.f, k)
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn level(&self, values: &[f64], k: usize) -> Vec<f64> {
        let s = self.nodes * self.nodes;
        let k = k.min(self.levels - 1);
        values[k * s..(k + 1) * s].to_vec()
    }
}

/// `R₀₀` at the slab centre and the verdict of the non-isometry certificate.
#[wasm_bindgen]
pub fn certificate(nodes: usize, amplitude: f64, width: f64) -> Result<String, JsError> {
    let g = grid(nodes)?;
    let c = nonisometry_certificate(&factor(-1.0, 2.6, amplitude, width)?, &g).map_err(js)?;
    Ok(json!({
        "r00": c.critical.r00,
        "expected_r00": c.expected_r00,
        "fd_r00": c.critical.fd_r00,
        "tolerance": c.tolerance,
        "max_residual": c.max_residual,
        "non_isometric": c.verdict == Verdict::NonIsometric,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clear_slab_matches_and_crossing_slab_does_not() {
        let parse = |s: String| serde_json::from_str::<serde_json::Value>(&s).unwrap();
        let clear = parse(dn_comparison(33, 1.0, 0.15, false).unwrap());
        let crossing = parse(dn_comparison(33, 1.0, 0.15, true).unwrap());
        assert_eq!(clear["clearance_passed"], true);
        assert_eq!(crossing["clearance_passed"], false);
        let (a, b) = (clear["relative_frobenius"].as_f64().unwrap(), crossing["relative_frobenius"].as_f64().unwrap());
        assert!(a < 0.05 && b > 10.0 * a, "{a} {b}");
    }

    #[test]
    fn movie_frames_have_one_value_per_node() {
        let m = WaveMovie::new(17, 1.0, 0.15, true).unwrap();
        assert_eq!(m.frame(0).len(), 17 * 17);
        assert!(m.frame(0).iter().all(|&v| v == 0.0));
        assert!(m.max_abs() > 0.0);
        // slab centre (peak f = 1 + e⁻¹) passes x₀ at t = 2.6
        let k = (2.6 / m.time(1)).round() as usize;
        assert!(m.factor_frame(k).iter().any(|&f| f > 1.3));
        assert!(m.factor_frame(0).iter().all(|&f| f == 1.0));
    }

    #[test]
    fn certificate_fires_only_with_amplitude() {
        let on: serde_json::Value = serde_json::from_str(&certificate(33, 1.0, 0.15).unwrap()).unwrap();
        let off: serde_json::Value = serde_json::from_str(&certificate(33, 0.0, 0.15).unwrap()).unwrap();
        assert_eq!(on["non_isometric"], true);
        assert_eq!(off["non_isometric"], false);
    }
}
