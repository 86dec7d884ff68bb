mod common;

use std::f64::consts::PI;

use common::{forced, homogeneous, two_segment};
use fracstep_core::verification::{
    blowup_rate_fit, c0_dl_norm, data_functional, default_time_probes, initial_limit_check, interior_probe_grid,
    regularity_report, residual_check, source_rate_fit, w11_norm,
};
use fracstep_core::{relaxation, SolutionField, TimeProfile};

#[test]
fn data_functional_of_a_pure_mode() {
    let spec = homogeneous(vec![0.0, 0.5, 1.0], vec![0.3, 0.8], vec![1.0]);
    for j in 0..2 {
        assert!((data_functional(&spec, j).unwrap() - PI * PI).abs() < 1e-12);
    }
    assert!(data_functional(&spec, 2).is_err());
}

#[test]
fn graph_norm_peaks_at_the_start_without_source() {
    let spec = homogeneous(vec![0.0, 1.0], vec![0.5], vec![0.7]);
    let field = SolutionField::solve(&spec).unwrap();
    let v = c0_dl_norm(&field, &default_time_probes(&field)).unwrap();
    assert!((v - 0.7 * PI * PI).abs() < 1e-12);
}

#[test]
fn w11_of_monotone_decay() {
    // |v'| integrates to u_0 - u(T)
    for &beta in &[0.5, 0.999] {
        let spec = homogeneous(vec![0.0, 1.0], vec![beta], vec![1.0]);
        let field = SolutionField::solve(&spec).unwrap();
        let w = w11_norm(&field).unwrap();
        let exact = 1.0 - relaxation(beta, PI * PI, 1.0).unwrap();
        assert!((w - exact).abs() < 1e-6, "beta {beta}: {w} vs {exact}");
        if beta > 0.99 {
            let classical = 1.0 - (-PI * PI).exp();
            assert!((w - classical).abs() < 0.02 * classical);
        }
    }
}

#[test]
fn w11_against_trapezoid_on_graded_mesh() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    let w = w11_norm(&field).unwrap();
    let mut total = 0.0;
    for (j, ctx) in field.contexts().iter().enumerate() {
        // t = h u^r with r = 2/beta turns u^{beta-1} into a term linear in u
        let n = 3000;
        let r = 2.0 / ctx.order;
        let mapped = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let tau = ctx.length * u.powf(r);
            let norm = (0..2)
                .map(|m| field.segment(m, j).derivative(ctx, tau).unwrap().powi(2))
                .sum::<f64>()
                .sqrt();
            norm * ctx.length * r * u.powf(r - 1.0)
        };
        let du = 1.0 / n as f64;
        let inner: f64 = (1..n).map(|k| mapped(k as f64 * du)).sum();
        total += du * (inner + 0.5 * (mapped(0.0) + mapped(1.0)));
    }
    assert!((w - total).abs() < 1e-4, "{w} vs {total}");
}

#[test]
fn blowup_exponents_on_constant_order() {
    // short horizon keeps lambda delta^beta small over the whole fit window
    for &(beta, target) in &[(0.5, -0.5), (0.8, -0.2)] {
        let spec = homogeneous(vec![0.0, 0.01], vec![beta], vec![1.0, 0.5]);
        let field = SolutionField::solve(&spec).unwrap();
        let fit = blowup_rate_fit(&field, 0).unwrap();
        let p = fit.exponent.unwrap();
        assert!((p - target).abs() <= 0.05, "beta {beta}: {p}");
    }
}

#[test]
fn history_correction_rate_is_bounded() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    let fit = source_rate_fit(&spec, &field, 1).unwrap();
    let p = fit.exponent.unwrap();
    let bound = -0.8 - spec.regularity()[1] - 0.05;
    assert!(p >= bound, "{p} < {bound}");
}

#[test]
fn sentinels_for_vanishing_quantities() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    assert_eq!(source_rate_fit(&spec, &field, 0).unwrap().exponent, None);
    let zero = homogeneous(vec![0.0, 0.5, 1.0], vec![0.3, 0.8], vec![0.0]);
    let zf = SolutionField::solve(&zero).unwrap();
    assert_eq!(blowup_rate_fit(&zf, 1).unwrap().exponent, None);
    let lim = initial_limit_check(&zf).unwrap();
    assert!(lim.deviations.iter().all(|d| *d == 0.0));
    assert!(lim.passes());
    assert!(blowup_rate_fit(&zf, 2).is_err());
}

#[test]
fn residual_of_the_scalar_identity() {
    let spec = homogeneous(vec![0.0, 1.0], vec![0.5], vec![1.0]);
    let field = SolutionField::solve(&spec).unwrap();
    let r = residual_check(&field, &spec, &interior_probe_grid(&field, 10, 10)).unwrap();
    assert!(r <= 1e-5, "{r}");
}

#[test]
fn residual_with_source_and_switch() {
    let spec = forced(
        vec![0.0, 0.4, 1.0],
        vec![0.6, 0.3],
        vec![0.5, -0.2],
        TimeProfile::new(vec![(1.0, 0.0), (2.0, 1.0)]).unwrap(),
    );
    let field = SolutionField::solve(&spec).unwrap();
    let r = residual_check(&field, &spec, &interior_probe_grid(&field, 4, 3)).unwrap();
    assert!(r <= 1e-3, "{r}");
}

#[test]
fn probes_avoid_breakpoints() {
    let spec = homogeneous(vec![0.0, 0.45, 1.0], vec![0.3, 0.8], vec![1.0]);
    let field = SolutionField::solve(&spec).unwrap();
    let probes = interior_probe_grid(&field, 10, 10);
    assert_eq!(probes.len(), 100);
    for (x, t) in probes {
        assert!(x > 0.0 && x < 1.0);
        assert!((t - 0.45).abs() >= 0.45e-3 * 0.999);
    }
}

#[test]
fn initial_limit_without_source() {
    let spec = homogeneous(vec![0.0, 1.0], vec![0.8], vec![1.0]);
    let field = SolutionField::solve(&spec).unwrap();
    let lim = initial_limit_check(&field).unwrap();
    for (t, d) in lim.times.iter().zip(&lim.deviations) {
        let expect = 1.0 - relaxation(0.8, PI * PI, *t).unwrap();
        assert!((d - expect).abs() < 1e-10);
    }
    assert!(lim.strictly_decreasing());
    assert!(lim.passes());
}

#[test]
fn report_is_consistent() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    let rep = regularity_report(&spec, &field).unwrap();
    assert!(rep.junction_gaps.iter().all(|g| *g == 0.0));
    let ratio = rep.estimate_ratio().unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
    assert_eq!(rep.blowup.len(), 2);
    assert!(rep.residual_max < 1e-3);
}
