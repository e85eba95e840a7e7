#![allow(dead_code)]

use conflab::conformal::bump::BumpProfile;
use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::dn::patch::{BoundaryPatch, FaceSpec, PatchSpec};
use conflab::solver::{observed_order, BoundarySource};
use conflab::{stencil, Face, MetricSpec, Side, SpacetimeGrid, TimeLevel};

pub fn unit(nodes: usize, t_final: f64) -> SpacetimeGrid {
    SpacetimeGrid::unit(2, nodes, t_final, 0.5).unwrap()
}

/// Slab crossing the middle of the unit square around `t = t0`.
pub fn plane_wave(amplitude: f64, width: f64, t0: f64) -> PlaneWaveFactor {
    PlaneWaveFactor::new(
        vec![1.0, 0.0],
        vec![0.5, 0.5],
        t0,
        BumpProfile::new(amplitude, width, 0.0).unwrap(),
    )
    .unwrap()
}

/// Observed orders between successive errors of a halving ladder.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| observed_order(w[0], w[1], 2.0).unwrap_or(f64::NAN))
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Metric components `g_ab` at every node, one array per `(a, b)`.
pub fn metric_components(metric: &MetricSpec) -> Vec<Vec<f64>> {
    let grid = metric.grid();
    let m = grid.m();
    let spatial = grid.spatial_len();
    let mut comps = vec![vec![0.0; grid.len()]; m * m];
    for idx in 0..grid.len() {
        let (k, node) = (idx / spatial, idx % spatial);
        let p = grid.point(k, node);
        let c = metric.c_at(&p, TimeLevel::Node(k), node);
        let g = metric.metric_components(c, &p[1..]);
        for ab in 0..m * m {
            comps[ab][idx] = g[ab];
        }
    }
    comps
}

/// `Γⁱ_kl = ½ gⁱʲ(∂_k g_jl + ∂_l g_jk − ∂_j g_kl)` by differencing the
/// (diagonal) metric components; arrays indexed `(i*m + k)*m + l`.
pub fn fd_christoffel(grid: &SpacetimeGrid, g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = grid.m();
    let d = |a: usize, comp: &Vec<f64>, idx: usize| stencil::d1(grid, a, idx, |j| comp[j]);
    let mut out = vec![vec![0.0; grid.len()]; m * m * m];
    for idx in 0..grid.len() {
        for i in 0..m {
            let gii = 1.0 / g[i * m + i][idx];
            for k in 0..m {
                for l in 0..m {
                    let v = d(k, &g[i * m + l], idx) + d(l, &g[i * m + k], idx) - d(i, &g[k * m + l], idx);
                    out[(i * m + k) * m + l][idx] = 0.5 * gii * v;
                }
            }
        }
    }
    out
}

/// `R = gᵃᵇ R_ab` with `R_ab = ∂_c Γᶜ_ab − ∂_b Γᶜ_ac + Γᶜ_cd Γᵈ_ab − Γᶜ_bd Γᵈ_ac`,
/// every derivative by differences.
pub fn fd_scalar_curvature(grid: &SpacetimeGrid, g: &[Vec<f64>]) -> Vec<f64> {
    let m = grid.m();
    let gam = fd_christoffel(grid, g);
    let at = |i: usize, k: usize, l: usize| &gam[(i * m + k) * m + l];
    (0..grid.len())
        .map(|idx| {
            let mut r = 0.0;
            for a in 0..m {
                let gaa = 1.0 / g[a * m + a][idx];
                let b = a;
                let mut rab = 0.0;
                for c in 0..m {
                    rab += stencil::d1(grid, c, idx, |j| at(c, a, b)[j]);
                    rab -= stencil::d1(grid, b, idx, |j| at(c, a, c)[j]);
                    for d in 0..m {
                        rab += at(c, c, d)[idx] * at(d, a, b)[idx] - at(c, b, d)[idx] * at(d, a, c)[idx];
                    }
                }
                r += gaa * rab;
            }
            r
        })
        .collect()
}

/// True when `idx` is at least `depth` nodes away from every face of the grid.
pub fn deep_interior(grid: &SpacetimeGrid, idx: usize, depth: usize) -> bool {
    let spatial = grid.spatial_len();
    let (k, node) = (idx / spatial, idx % spatial);
    if k < depth || k + depth > grid.steps() {
        return false;
    }
    let n = grid.nodes_per_axis();
    let mut rest = node;
    (0..grid.n()).all(|_| {
        let i = rest % n;
        rest /= n;
        i >= depth && i + depth < n
    })
}

/// Patch on the face `x¹ = 0` over `x² ∈ (0.25, 0.75)`.
pub fn lower_patch(g: &SpacetimeGrid, time: (f64, f64)) -> BoundaryPatch {
    let spec = PatchSpec {
        id: "gamma".into(),
        faces: vec![FaceSpec {
            axis: 1,
            side: Side::Lower,
            ranges: vec![(0.25, 0.75)],
        }],
        time,
    };
    BoundaryPatch::from_spec(g, &spec).unwrap()
}

/// Bump on [`lower_patch`] centred at `x² = 0.5` with time support `(0.1, 0.8)`.
pub fn lower_source(g: &SpacetimeGrid, patch: &BoundaryPatch, amplitude: f64) -> BoundarySource {
    BoundarySource::new(g, patch, Face::new(1, Side::Lower), vec![(0.5, 0.15)], (0.45, 0.35), amplitude).unwrap()
}
