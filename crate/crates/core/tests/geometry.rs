mod common;

use common::*;
use conflab::conformal::scale_metric;
use conflab::function::SpacetimeFunction;
use std::sync::Arc;
use conflab::geometry::{
    christoffel_conformal, curvature_suite, scalar_curvature, scalar_curvature_conformal_check,
    strict_hyperbolicity_check, wave_operator_residual,
};
use conflab::rigidity::geometry_at;
use conflab::{Factor, MetricSpec, ScalarField, StaticBase};

#[test]
fn wave_operator_of_t_squared_is_two() {
    let g = unit(17, 0.5);
    let r = wave_operator_residual(&MetricSpec::minkowski(&g), &ScalarField::sample(&g, |p| p[0] * p[0])).unwrap();
    assert!(r.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
}

#[test]
fn wave_operator_is_exact_on_quadratics() {
    let g = unit(9, 0.5);
    let u = ScalarField::sample(&g, |p| 0.3 * p[0] * p[1] - 2.0 * p[2] * p[2] + p[1] * p[2] + 0.5 * p[0] * p[0]);
    let r = wave_operator_residual(&MetricSpec::minkowski(&g), &u).unwrap();
    // □ = ∂_t² − Δ: 1 − (−4)
    assert!(r.values().iter().all(|v| (v - 5.0).abs() < 1e-9));
}

#[test]
fn plane_wave_is_a_minkowski_wave() {
    let f = plane_wave(1.0, 2.0, 0.25);
    let errors: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let g = unit(n, 0.5);
            let u = ScalarField::sample(&g, |p| f.value(p));
            wave_operator_residual(&MetricSpec::minkowski(&g), &u).unwrap().max_abs()
        })
        .collect();
    let o = orders(&errors);
    assert!(o[1] >= 1.9, "errors {errors:?} orders {o:?}");
}

#[test]
fn time_gradient_is_negative_for_the_family() {
    let g = unit(17, 1.0);
    let eta = MetricSpec::minkowski(&g);
    let scaled = scale_metric(&eta, plane_wave(5.0, 0.3, 0.5).into()).unwrap();
    let curved = MetricSpec::static_base(
        &g,
        StaticBase::Gaussian {
            amplitude: 0.3,
            center: vec![0.5, 0.5],
            scale: 0.1,
        },
    )
    .unwrap();
    for metric in [eta, scaled, curved] {
        assert!(metric.max_g_tt() < 0.0);
    }
}

#[test]
fn christoffel_matches_brute_force_differences() {
    let f = plane_wave(1.0, 2.0, 0.125);
    let mut err_ours = Vec::new();
    let mut err_oracle = Vec::new();
    let mut gap = Vec::new();
    for n in [33, 65] {
        let g = unit(n, 0.25);
        let eta = MetricSpec::minkowski(&g);
        let scaled = scale_metric(&eta, f.clone().into()).unwrap();
        // h = ½ ln c = 2 ln f in 2+1 dimensions
        let h = ScalarField::sample(&g, |p| 2.0 * f.value(p).ln());
        let ours = christoffel_conformal(&h, &eta).unwrap();
        let oracle = fd_christoffel(&g, &metric_components(&scaled));
        let m = g.m();
        let spatial = g.spatial_len();
        let (mut e1, mut e2, mut e3) = (0.0f64, 0.0f64, 0.0f64);
        for idx in 0..g.len() {
            let exact = geometry_at(&scaled, &g.point(idx / spatial, idx % spatial)).unwrap();
            for ikl in 0..m * m * m {
                let (i, k, l) = (ikl / (m * m), (ikl / m) % m, ikl % m);
                let a = ours.christoffel(idx, i, k, l);
                let b = oracle[ikl][idx];
                e1 = e1.max((a - exact.christoffel[ikl]).abs());
                e2 = e2.max((b - exact.christoffel[ikl]).abs());
                e3 = e3.max((a - b).abs());
            }
        }
        err_ours.push(e1);
        err_oracle.push(e2);
        gap.push(e3);
    }
    for (name, e) in [("conformal", &err_ours), ("brute force", &err_oracle), ("gap", &gap)] {
        let o = orders(e);
        assert!(o[0] >= 1.8, "{name}: errors {e:?} order {o:?}");
    }
}

#[test]
fn christoffel_of_flat_metric_vanishes() {
    let g = unit(9, 0.5);
    let eta = MetricSpec::minkowski(&g);
    let gamma = christoffel_conformal(&ScalarField::zeros(&g), &eta).unwrap();
    assert_eq!(gamma.max_abs(), 0.0);
    let linear = christoffel_conformal(&ScalarField::sample(&g, |p| p[1]), &eta).unwrap();
    for idx in 0..g.len() {
        assert!((linear.christoffel(idx, 1, 0, 0) - 1.0).abs() < 1e-12);
    }
    let mismatched = unit(17, 0.5);
    assert!(christoffel_conformal(&ScalarField::zeros(&mismatched), &eta).is_err());
}

#[test]
fn minkowski_curvature_is_zero() {
    let g = unit(9, 0.5);
    let c = curvature_suite(&MetricSpec::minkowski(&g)).unwrap();
    assert_eq!(c.ricci.max_abs(), 0.0);
    assert_eq!(c.scalar.max_abs(), 0.0);
    assert_eq!(c.schouten.max_abs(), 0.0);
    let line = conflab::SpacetimeGrid::unit(1, 9, 0.5, 0.5).unwrap();
    assert!(curvature_suite(&MetricSpec::minkowski(&line)).is_err());
}

#[test]
fn scaled_plane_wave_metric_is_scalar_flat() {
    let f = plane_wave(1.0, 2.0, 0.25);
    let errors: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let g = unit(n, 0.5);
            let scaled = scale_metric(&MetricSpec::minkowski(&g), f.clone().into()).unwrap();
            scalar_curvature(&scaled).unwrap().max_abs()
        })
        .collect();
    let o = orders(&errors);
    assert!(o[1] >= 1.9, "errors {errors:?} orders {o:?}");
}

#[test]
fn scalar_curvature_of_exponential_metric_two_ways() {
    // e^{2x¹}η, m = 3: R = −(m−1)(m−2)|dh|² e^{−2h} = −2 e^{−2x¹}
    let mut err_formula = Vec::new();
    let mut err_oracle = Vec::new();
    for n in [17, 33, 65] {
        let g = unit(n, 0.25);
        let f = ScalarField::sample(&g, |p| p[1].exp());
        let metric = MetricSpec::minkowski(&g).with_factor(Factor::Sampled(Arc::new(f)), 2.0).unwrap();
        let exact: Vec<f64> = (0..g.len())
            .map(|idx| -2.0 * (-2.0 * g.point(idx / g.spatial_len(), idx % g.spatial_len())[1]).exp())
            .collect();
        let ours = scalar_curvature(&metric).unwrap();
        let oracle = fd_scalar_curvature(&g, &metric_components(&metric));
        err_formula.push(max_abs(
            &ours.values().iter().zip(&exact).map(|(a, b)| a - b).collect::<Vec<_>>(),
        ));
        // nested one-sided differences lose an order on the boundary layer
        let interior: Vec<f64> = (0..g.len())
            .filter(|&idx| deep_interior(&g, idx, 2))
            .map(|idx| oracle[idx] - exact[idx])
            .collect();
        err_oracle.push(max_abs(&interior));
    }
    // h = x¹ is linear, so the conformal formula differences it exactly
    assert!(err_formula.iter().all(|&e| e < 1e-9), "formula {err_formula:?}");
    let o = orders(&err_oracle);
    assert!(o[1] >= 1.8, "oracle {err_oracle:?} {o:?}");
}

#[test]
fn scalar_curvature_scaling_law() {
    let pw = plane_wave(1.0, 2.0, 0.25);
    let mut linear = Vec::new();
    let mut wave = Vec::new();
    for n in [33, 65, 129] {
        let g = unit(n, 0.25);
        let eta = MetricSpec::minkowski(&g);
        let f1 = ScalarField::sample(&g, |p| 1.0 + 0.1 * p[1]);
        linear.push(scalar_curvature_conformal_check(&eta, &f1).unwrap().max_abs());
        let f2 = ScalarField::sample(&g, |p| pw.value(p));
        wave.push(scalar_curvature_conformal_check(&eta, &f2).unwrap().max_abs());
    }
    let (o1, o2) = (orders(&linear), orders(&wave));
    assert!(o1[1] >= 1.9, "linear {linear:?} {o1:?}");
    assert!(o2[1] >= 1.9, "wave {wave:?} {o2:?}");
    let g = unit(9, 0.25);
    let one = ScalarField::constant(&g, 1.0);
    assert_eq!(scalar_curvature_conformal_check(&MetricSpec::minkowski(&g), &one).unwrap().max_abs(), 0.0);
}

#[test]
fn hyperbolicity_on_counterexample_metrics() {
    let g = unit(33, 3.0);
    let eta = MetricSpec::minkowski(&g);
    let scaled = scale_metric(&eta, plane_wave(10.0, 0.15, 1.5).into()).unwrap();
    for metric in [&eta, &scaled] {
        let r = strict_hyperbolicity_check(metric, 1000, 42).unwrap();
        assert!(r.passed && r.samples == 1000 && r.min_discriminant > 0.0);
    }
    let a = strict_hyperbolicity_check(&scaled, 50, 7).unwrap();
    let b = strict_hyperbolicity_check(&scaled, 50, 7).unwrap();
    assert_eq!(a, b);
}
