mod common;

use std::sync::Arc;

use common::*;
use conflab::conformal::manufactured::ManufacturedFactor;
use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::conformal::bump::BumpProfile;
use conflab::conformal::scale_metric;
use conflab::dn::{
    assemble_dn_matrix, compare_dn, disjointness_check, make_source_basis, normal_derivative, normal_derivative_trace,
    receivers, BoundaryPatch, DnConfig, FaceSpec, PatchSpec,
};
use conflab::solver::mms::TravellingWave;
use conflab::solver::{solve, SolverConfig, Superposition, WaveField};
use conflab::{Face, Factor, LabError, MetricSpec, ScalarField, Side, SpacetimeGrid, StaticBase};

fn patch(g: &SpacetimeGrid, id: &str, axis: usize, side: Side, range: (f64, f64), time: (f64, f64)) -> BoundaryPatch {
    let spec = PatchSpec {
        id: id.into(),
        faces: vec![FaceSpec {
            axis,
            side,
            ranges: vec![range],
        }],
        time,
    };
    BoundaryPatch::from_spec(g, &spec).unwrap()
}

#[test]
fn basis_layout() {
    let g = unit(33, 3.0);
    let p = lower_patch(&g, (0.2, 2.8));
    let single = make_source_basis(&g, &p, &[1, 1]).unwrap();
    assert_eq!(single.len(), 1);
    assert!((single[0].tangential[0].0 - 0.5).abs() < 1e-12);
    let basis = make_source_basis(&g, &p, &[4, 2]).unwrap();
    assert_eq!(basis.len(), 8);
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            assert!(a.tangential[0].0 != b.tangential[0].0 || a.temporal.0 != b.temporal.0);
        }
    }
    assert!(make_source_basis(&g, &p, &[100, 1]).is_err());
    assert!(make_source_basis(&g, &p, &[0, 1]).is_err());
}

#[test]
fn trace_of_simple_fields() {
    let g = unit(9, 0.5);
    let eta = MetricSpec::minkowski(&g);
    let upper = patch(&g, "upper", 1, Side::Upper, (0.2, 0.8), (0.1, 0.4));
    let zero = WaveField::from_full(ScalarField::zeros(&g));
    assert!(normal_derivative_trace(&zero, &eta, &upper, 1).unwrap().iter().all(|&v| v == 0.0));
    let linear = WaveField::from_full(ScalarField::sample(&g, |p| p[1]));
    let samples = normal_derivative_trace(&linear, &eta, &upper, 1).unwrap();
    assert!(!samples.is_empty());
    assert!(samples.iter().all(|&v| (v - 1.0).abs() < 1e-12), "{samples:?}");
    // on the lower face the outward normal points along −x¹
    let lower = patch(&g, "lower", 1, Side::Lower, (0.2, 0.8), (0.1, 0.4));
    assert!(normal_derivative_trace(&linear, &eta, &lower, 1)
        .unwrap()
        .iter()
        .all(|&v| (v + 1.0).abs() < 1e-12));
}

#[test]
fn trace_of_solved_field_converges() {
    let wave = TravellingWave::default_for(2);
    let solved: Vec<(SpacetimeGrid, WaveField)> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let g = unit(n, 1.0);
            let u = solve(&MetricSpec::minkowski(&g), &wave, &SolverConfig::default()).unwrap();
            (g, u)
        })
        .collect();
    let (g0, _) = &solved[0];
    let p0 = patch(g0, "rx", 1, Side::Lower, (0.25, 0.75), (0.2, 0.9));
    let face = Face::new(1, Side::Lower);
    // coarse receiver (k, i) sits at (2ʲk, 2ʲi) on level j
    let sample = |level: usize, k: usize, node: usize| {
        let (g, u) = &solved[level];
        let scale = 1usize << level;
        let multi: Vec<usize> = g0.multi_index(node).iter().map(|i| i * scale).collect();
        normal_derivative(u, &MetricSpec::minkowski(g), face, g.spatial_index(&multi), k * scale).unwrap()
    };
    let rx = receivers(g0, &p0, 1);
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for &(k, node) in &rx {
        let (a, b, c) = (sample(0, k, node), sample(1, k, node), sample(2, k, node));
        d1 = d1.max((a - b).abs());
        d2 = d2.max((b - c).abs());
    }
    let order = (d1 / d2).log2();
    assert!(order >= 1.5, "differences {d1} {d2} order {order}");
}

fn small_setup(g: &SpacetimeGrid) -> (BoundaryPatch, Vec<conflab::solver::BoundarySource>) {
    let p = lower_patch(g, (0.05, 1.45));
    let basis = make_source_basis(g, &p, &[2, 2]).unwrap();
    (p, basis)
}

#[test]
fn zero_amplitude_basis_gives_zero_matrix() {
    let g = unit(17, 1.5);
    let (p, basis) = small_setup(&g);
    let silent: Vec<_> = basis.iter().map(|s| s.scaled(0.0)).collect();
    let m = assemble_dn_matrix(&MetricSpec::minkowski(&g), &p, &p, &silent, &DnConfig::default()).unwrap();
    assert_eq!(m.cols(), 4);
    assert!(m.rows() > 0);
    assert_eq!(m.max_abs(), 0.0);
}

#[test]
fn self_patch_matrix_is_nonzero_and_linear() {
    let g = unit(33, 1.5);
    let (p, basis) = small_setup(&g);
    let eta = MetricSpec::minkowski(&g);
    let cfg = DnConfig::default();
    let m = assemble_dn_matrix(&eta, &p, &p, &basis, &cfg).unwrap();
    assert!(m.max_abs() > 0.0 && m.values.iter().all(|v| v.is_finite()));
    let both = Superposition(vec![(1.0, basis[0].clone()), (1.0, basis[3].clone())]);
    let field = solve(&eta, &both, &SolverConfig::default()).unwrap();
    let col = normal_derivative_trace(&field, &eta, &p, cfg.stride).unwrap();
    let (c0, c3) = (m.column(0), m.column(3));
    for r in 0..m.rows() {
        assert!((col[r] - c0[r] - c3[r]).abs() <= 1e-12 * m.max_abs());
    }
}

#[test]
fn assembly_is_deterministic_and_csv_round_trips_hashes() {
    let g = unit(17, 1.5);
    let (p, basis) = small_setup(&g);
    let eta = MetricSpec::minkowski(&g);
    let a = assemble_dn_matrix(&eta, &p, &p, &basis, &DnConfig::default()).unwrap();
    let b = assemble_dn_matrix(&eta, &p, &p, &basis, &DnConfig::default()).unwrap();
    assert_eq!(a, b);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&g, &mut ca).unwrap();
    b.write_csv(&g, &mut cb).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca.clone()).unwrap();
    assert!(text.starts_with("# {"));
    assert_eq!(text.lines().count(), 2 + a.rows());
    let side = a.sidecar(&ca);
    assert_eq!(side["csv_sha256"].as_str().unwrap(), conflab::dn::sha256_hex(&ca));
}

#[test]
fn comparison_semantics() {
    let g = unit(17, 1.5);
    let (p, basis) = small_setup(&g);
    let eta = MetricSpec::minkowski(&g);
    let curved = MetricSpec::static_base(
        &g,
        StaticBase::Gaussian {
            amplitude: 0.3,
            center: vec![0.5, 0.5],
            scale: 0.1,
        },
    )
    .unwrap();
    let cfg = DnConfig::default();
    let a = assemble_dn_matrix(&eta, &p, &p, &basis, &cfg).unwrap();
    let b = assemble_dn_matrix(&curved, &p, &p, &basis, &cfg).unwrap();
    let same = compare_dn(&a, &a).unwrap();
    assert_eq!(same.relative_frobenius, 0.0);
    assert_eq!(same.max_abs_difference, 0.0);
    let (ab, ba) = (compare_dn(&a, &b).unwrap(), compare_dn(&b, &a).unwrap());
    assert!(ab.relative_max > 0.0);
    assert_eq!(ab.relative_max, ba.relative_max);
    assert_eq!(ab.max_abs_difference, ba.max_abs_difference);
    assert_eq!(ab.column_differences.len(), basis.len());

    let coarse = DnConfig { stride: 3, ..cfg };
    let c = assemble_dn_matrix(&eta, &p, &p, &basis, &coarse).unwrap();
    assert!(matches!(compare_dn(&a, &c), Err(LabError::Metadata(_))));
    let fewer = assemble_dn_matrix(&eta, &p, &p, &basis[..2], &cfg).unwrap();
    assert!(matches!(compare_dn(&a, &fewer), Err(LabError::Metadata(_))));
}

#[test]
fn disjointness_cases() {
    let g = unit(17, 1.0);
    let lower = patch(&g, "a", 1, Side::Lower, (0.25, 0.75), (0.2, 0.8));
    let upper = patch(&g, "b", 1, Side::Upper, (0.25, 0.75), (0.2, 0.8));
    assert!(disjointness_check(&g, &lower, &upper));
    assert!(!disjointness_check(&g, &lower, &lower));
    let all = PatchSpec {
        id: "all".into(),
        faces: [(1, Side::Lower), (2, Side::Lower), (2, Side::Upper)]
            .into_iter()
            .map(|(axis, side)| FaceSpec {
                axis,
                side,
                ranges: vec![(0.0, 1.0)],
            })
            .collect(),
        time: (0.0, 1.0),
    };
    let rest = PatchSpec {
        id: "rest".into(),
        faces: vec![FaceSpec {
            axis: 1,
            side: Side::Upper,
            ranges: vec![(0.0, 1.0)],
        }],
        time: (0.0, 1.0),
    };
    let (all, rest) = (BoundaryPatch::from_spec(&g, &all).unwrap(), BoundaryPatch::from_spec(&g, &rest).unwrap());
    assert!(!disjointness_check(&g, &all, &rest));
}

#[test]
fn scaled_minkowski_dn_matrix_converges_to_minkowski() {
    // slab meets x¹ = 0 only after t = 1.75
    let f = PlaneWaveFactor::new(vec![-1.0, 0.0], vec![0.5, 0.5], 1.4, BumpProfile::new(1.0, 0.15, 0.0).unwrap()).unwrap();
    let rel: Vec<f64> = [33, 65]
        .iter()
        .map(|&n| {
            let g = unit(n, 1.5);
            let (p, basis) = small_setup(&g);
            let eta = MetricSpec::minkowski(&g);
            let scaled = scale_metric(&eta, f.clone().into()).unwrap();
            let cfg = DnConfig::default();
            let a = assemble_dn_matrix(&scaled, &p, &p, &basis, &cfg).unwrap();
            let b = assemble_dn_matrix(&eta, &p, &p, &basis, &cfg).unwrap();
            compare_dn(&a, &b).unwrap().relative_frobenius
        })
        .collect();
    assert!(rel[1] <= 0.5 * rel[0], "{rel:?}");
}

#[test]
fn manufactured_factor_leaves_receiver_traces_zero() {
    let g = unit(33, 1.5);
    let base = MetricSpec::static_base(
        &g,
        StaticBase::Gaussian {
            amplitude: 0.3,
            center: vec![0.5, 0.5],
            scale: 0.1,
        },
    )
    .unwrap();
    let g1 = patch(&g, "gamma1", 1, Side::Lower, (0.25, 0.75), (0.1, 1.4));
    let g2 = patch(&g, "gamma2", 1, Side::Upper, (0.25, 0.75), (0.1, 1.4));
    let psi_patch = patch(&g, "psi", 2, Side::Lower, (0.3, 0.7), (0.1, 1.0));
    assert!(disjointness_check(&g, &g1, &g2));
    let psi = make_source_basis(&g, &psi_patch, &[1, 1]).unwrap().remove(0);
    let factor = ManufacturedFactor::build(&base, psi, 0.2, 1 << 30).unwrap();
    let scaled = scale_metric(&base, Factor::Manufactured(Arc::new(factor))).unwrap();
    let source = make_source_basis(&g, &g1, &[1, 1]).unwrap().remove(0);
    let u = solve(&scaled, &source, &SolverConfig::default()).unwrap();
    assert!(u.max_abs() > 0.0);
    let mut worst = 0.0f64;
    for k in g2.steps() {
        for node in g2.nodes(&g) {
            worst = worst.max(u.value(k, node).unwrap().abs());
        }
    }
    assert!(worst <= 1e-12);
}
