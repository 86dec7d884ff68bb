mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{forced, homogeneous, two_segment, unit_operator};
use fracstep_core::{
    relaxation, Backend, L1Grid, OperatorSpec, OrderSchedule, ProblemSpec, ProblemSpecF32, SeparableSource,
    SolutionField, SolutionFieldF32, SpatialProfile, TimeProfile,
};

fn samples(n: usize, horizon: f64) -> Vec<f64> {
    (1..=n).map(|k| horizon * k as f64 / n as f64).collect()
}

#[test]
fn single_segment_relaxation() {
    let spec = homogeneous(vec![0.0, 1.0], vec![0.4], vec![1.0, -0.5, 0.25]);
    let field = SolutionField::solve(&spec).unwrap();
    for t in samples(50, 1.0) {
        for (n, c) in [1.0, -0.5, 0.25].iter().enumerate() {
            let lam = ((n + 1) as f64 * PI).powi(2);
            let exact = c * relaxation(0.4, lam, t).unwrap();
            assert!((field.eval_mode(n, t).unwrap() - exact).abs() < 1e-8, "mode {n} t {t}");
        }
    }
}

#[test]
fn single_segment_constant_source() {
    let spec = forced(vec![0.0, 1.0], vec![0.7], vec![0.3], TimeProfile::constant(2.0));
    let field = SolutionField::solve(&spec).unwrap();
    let lam = PI * PI;
    let m = fracstep_core::MittagLeffler::new(fracstep_core::MLParams::new(0.7, 1.7).unwrap());
    for t in samples(40, 1.0) {
        let z = -lam * t.powf(0.7);
        let exact = 0.3 * relaxation(0.7, lam, t).unwrap() + 2.0 * t.powf(0.7) * m.eval(z).unwrap();
        assert!((field.eval_mode(0, t).unwrap() - exact).abs() < 1e-8, "t {t}");
    }
}

#[test]
fn equal_orders_reproduce_the_global_formula() {
    let spec = homogeneous(vec![0.0, 0.3, 1.0], vec![0.6, 0.6], vec![1.0, 0.5]);
    let field = SolutionField::solve(&spec).unwrap();
    for t in samples(35, 1.0).into_iter().filter(|t| *t > 0.3) {
        for (n, c) in [1.0, 0.5].iter().enumerate() {
            let lam = ((n + 1) as f64 * PI).powi(2);
            let exact = c * relaxation(0.6, lam, t).unwrap();
            assert!((field.eval_mode(n, t).unwrap() - exact).abs() < 1e-6, "mode {n} t {t}");
        }
    }
}

#[test]
fn segmentation_invariance_with_source() {
    let h = TimeProfile::new(vec![(1.0, 0.0), (-0.5, 0.6)]).unwrap();
    let one = forced(vec![0.0, 1.0], vec![0.5], vec![0.4, 0.2], h.clone());
    let split = forced(vec![0.0, 0.25, 0.7, 1.0], vec![0.5, 0.5, 0.5], vec![0.4, 0.2], h);
    let a = SolutionField::solve(&one).unwrap();
    let b = SolutionField::solve(&split).unwrap();
    for t in samples(64, 1.0) {
        for n in 0..2 {
            let d = (a.eval_mode(n, t).unwrap() - b.eval_mode(n, t).unwrap()).abs();
            assert!(d < 1e-6, "mode {n} t {t}: {d}");
        }
    }
}

#[test]
fn junctions_are_continuous() {
    let field = SolutionField::solve(&two_segment()).unwrap();
    assert!(field.junction_gaps().unwrap().iter().all(|g| *g == 0.0));
    for n in 0..2 {
        let left = field.segment(n, 0).end_value;
        assert_eq!(left, field.segment(n, 1).initial_value);
        assert_eq!(field.eval_mode(n, 0.5).unwrap(), left);
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let spec = forced(
        vec![0.0, 0.4, 1.0],
        vec![0.3, 0.8],
        vec![1.0, 0.5],
        TimeProfile::new(vec![(1.0, 0.5)]).unwrap(),
    );
    let field = SolutionField::solve(&spec).unwrap();
    for &t in &[0.05, 0.2, 0.37, 0.45, 0.6, 0.93] {
        for n in 0..2 {
            let h = 1e-5;
            let fd = (field.eval_mode(n, t + h).unwrap() - field.eval_mode(n, t - h).unwrap()) / (2.0 * h);
            let d = field.mode_derivative(n, t).unwrap();
            assert!((fd - d).abs() <= 1e-4 * d.abs(), "mode {n} t {t}: {fd} vs {d}");
        }
    }
}

#[test]
fn superposition() {
    let ha = TimeProfile::new(vec![(1.0, 0.3)]).unwrap();
    let hb = TimeProfile::constant(-0.7);
    let bp = vec![0.0, 0.5, 1.0];
    let ord = vec![0.4, 0.75];
    let a = SolutionField::solve(&forced(bp.clone(), ord.clone(), vec![1.0, 0.0], ha.clone())).unwrap();
    let b = SolutionField::solve(&forced(bp.clone(), ord.clone(), vec![0.0, 0.3], hb.clone())).unwrap();
    let s = OrderSchedule::new(bp, ord).unwrap();
    let src = SeparableSource::new(vec![
        (SpatialProfile::Modes(vec![1.0]), ha),
        (SpatialProfile::Modes(vec![1.0]), hb),
    ]);
    let sum = ProblemSpec::new(
        unit_operator(),
        Backend::Analytic,
        s.clone(),
        SpatialProfile::Modes(vec![1.0, 0.3]),
        Arc::new(src),
        ProblemSpec::default_regularity(&s),
        2,
        256,
    )
    .unwrap();
    let c = SolutionField::solve(&sum).unwrap();
    for t in samples(40, 1.0) {
        for n in 0..2 {
            let d = a.eval_mode(n, t).unwrap() + b.eval_mode(n, t).unwrap() - c.eval_mode(n, t).unwrap();
            assert!(d.abs() < 1e-9, "mode {n} t {t}: {d}");
        }
    }
}

fn assert_segmentwise_decay(field: &SolutionField<f64>, modes: usize) {
    let s = field.schedule().clone();
    for j in 0..s.segments() {
        let ts: Vec<f64> = (0..=40).map(|k| s.start(j) + s.width(j) * k as f64 / 40.0).collect();
        for n in 0..modes {
            let v = field.mode_trajectory(n, &ts).unwrap();
            for w in v.windows(2) {
                assert!(w[1].abs() <= w[0].abs() + 1e-12, "mode {n} segment {j}");
            }
        }
    }
}

#[test]
fn free_decay_is_monotone_for_rising_orders() {
    let spec = homogeneous(vec![0.0, 0.3, 0.6, 1.0], vec![0.2, 0.5, 0.9], vec![1.0, 0.4, 0.1]);
    assert_segmentwise_decay(&SolutionField::solve(&spec).unwrap(), 3);
    let spec = homogeneous(vec![0.0, 1.0], vec![0.35], vec![1.0, 0.4, 0.1]);
    assert_segmentwise_decay(&SolutionField::solve(&spec).unwrap(), 3);
}

#[test]
fn order_drop_lifts_the_trajectory() {
    // after 0.7 -> 0.2 the memory of the decay acts as a positive source
    let spec = homogeneous(vec![0.0, 0.3, 0.6, 1.0], vec![0.7, 0.2, 0.9], vec![1.0, 0.4, 0.1]);
    let field = SolutionField::solve(&spec).unwrap();
    let grid = L1Grid::new(&spec.schedule, 1e-4).unwrap();
    let l1 = fracstep_core::solve_mode_l1(PI * PI, |_| 0.0, &spec.schedule, 1.0, &grid).unwrap();
    let at = |m: usize| field.eval_mode(0, m as f64 * 1e-4).unwrap();
    assert!(at(3030) > at(3000) + 5e-3);
    assert!(l1[3030] > l1[2999] + 5e-3);
    assert!((at(3030) - l1[3030]).abs() < 1e-4);
    assert!(field.mode_derivative(0, 0.3 + 1e-6).unwrap() > 0.0);
}

#[test]
fn zero_data_gives_zero_field() {
    let spec = homogeneous(vec![0.0, 0.5, 1.0], vec![0.3, 0.8], vec![0.0, 0.0]);
    let field = SolutionField::solve(&spec).unwrap();
    for t in samples(10, 1.0) {
        assert!(field.coefficients(t).unwrap().iter().all(|c| *c == 0.0));
    }
}

#[test]
fn evaluation_outside_horizon_fails() {
    let field = SolutionField::solve(&two_segment()).unwrap();
    assert!(field.eval_mode(0, 1.5).is_err());
    assert!(field.eval_mode(0, -0.1).is_err());
    assert!(field.evaluate(2.0, 0.5).is_err());
}

#[test]
fn invalid_regularity_is_rejected() {
    let s = OrderSchedule::new(vec![0.0, 1.0], vec![0.6]).unwrap();
    let bad = ProblemSpec::new(
        unit_operator(),
        Backend::Analytic,
        s,
        SpatialProfile::Modes(vec![1.0]),
        Arc::new(SeparableSource::zero()),
        vec![0.4],
        1,
        16,
    );
    assert!(bad.is_err());
}

#[test]
fn finite_difference_backend_tracks_analytic() {
    let mut spec = two_segment();
    let a = SolutionField::solve(&spec).unwrap();
    spec.backend = Backend::FiniteDifference;
    spec.spatial_points = 1000;
    let b = SolutionField::solve(&spec).unwrap();
    for t in samples(10, 1.0) {
        for &x in &[0.2, 0.5, 0.77] {
            let d = (a.evaluate(x, t).unwrap() - b.evaluate(x, t).unwrap()).abs();
            assert!(d < 1e-4, "x {x} t {t}: {d}");
        }
    }
}

#[test]
fn matches_space_time_l1_oracle() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    let grid = L1Grid::new(&spec.schedule, 1.0 / 2048.0).unwrap();
    let interior = 127;
    let rows = spec.solve_full_l1_fd(&grid, interior).unwrap();
    let x = unit_operator().grid(interior);
    let mut worst: f64 = 0.0;
    for k in 1..=16 {
        let m = k * 128;
        let t = grid.time(m);
        for i in (16..interior).step_by(16) {
            worst = worst.max((rows[m][i] - field.evaluate(x[i], t).unwrap()).abs());
        }
    }
    assert!(worst <= 5e-3, "{worst}");
}

#[test]
fn single_precision_solve() {
    let s = OrderSchedule::<f32>::new(vec![0.0, 0.5, 1.0], vec![0.3, 0.8]).unwrap();
    let spec: ProblemSpecF32 = ProblemSpec::new(
        OperatorSpec::constant(1.0f32, 1.0, 0.0).unwrap(),
        Backend::Analytic,
        s.clone(),
        SpatialProfile::Modes(vec![1.0, 0.5]),
        Arc::new(SeparableSource::zero()),
        ProblemSpec::default_regularity(&s),
        2,
        64,
    )
    .unwrap();
    let field: SolutionFieldF32 = SolutionField::solve(&spec).unwrap();
    let reference = SolutionField::solve(&two_segment()).unwrap();
    for t in samples(16, 1.0) {
        for n in 0..2 {
            let a = field.eval_mode(n, t as f32).unwrap() as f64;
            let b = reference.eval_mode(n, t).unwrap();
            assert!((a - b).abs() < 1e-3, "mode {n} t {t}: {a} vs {b}");
        }
    }
}
