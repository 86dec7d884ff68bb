use std::f64::consts::PI;

use fracstep_core::{Coefficient, EigenSystem, OperatorSpec};

fn laplacian() -> OperatorSpec<f64> {
    OperatorSpec::constant(1.0, 1.0, 0.0).unwrap()
}

fn max_rel_error(p: usize) -> f64 {
    let sys = EigenSystem::finite_difference(&laplacian(), 5, p).unwrap();
    sys.eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let exact = ((k + 1) as f64 * PI).powi(2);
            (l - exact).abs() / exact
        })
        .fold(0.0, f64::max)
}

#[test]
fn finite_difference_matches_analytic_at_2000() {
    assert!(max_rel_error(2000) < 1e-3);
}

#[test]
fn finite_difference_converges_quadratically() {
    let ps = [250, 500, 1000, 2000];
    let errs: Vec<f64> = ps.iter().map(|&p| max_rel_error(p)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }
}

#[test]
fn reaction_shifts_spectrum() {
    let op = OperatorSpec::constant(1.0, 1.0, 10.0).unwrap();
    let sys = EigenSystem::analytic(&op, 4, 64).unwrap();
    for (k, l) in sys.eigenvalues().iter().enumerate() {
        assert!((l - ((k + 1) as f64 * PI).powi(2) - 10.0).abs() < 1e-12);
    }
    let fd = EigenSystem::finite_difference(&op, 4, 1000).unwrap();
    let base = EigenSystem::finite_difference(&laplacian(), 4, 1000).unwrap();
    for (a, b) in fd.eigenvalues().iter().zip(base.eigenvalues()) {
        assert!((a - b - 10.0).abs() < 1e-8);
    }
}

#[test]
fn variable_diffusivity_is_bracketed() {
    let a = Coefficient::from_fn(1.0, 201, |x: f64| 1.0 + x);
    let op = OperatorSpec::new(1.0, a, Coefficient::Constant(0.0), 1.0, 0.0).unwrap();
    assert!(EigenSystem::analytic(&op, 3, 100).is_err());
    let sys = EigenSystem::finite_difference(&op, 3, 800).unwrap();
    for (k, l) in sys.eigenvalues().iter().enumerate() {
        let base = ((k + 1) as f64 * PI).powi(2);
        assert!(*l > base && *l < 2.0 * base, "lambda_{} = {l}", k + 1);
    }
    assert!(sys.orthonormality_defect() < 1e-10);
    let grid = sys.grid();
    let mid = grid.len() / 2;
    assert!(sys.eigenfunction(0, grid[mid]).unwrap() > 0.0);
}

#[test]
fn eigenvectors_approach_sines() {
    let sys = EigenSystem::finite_difference(&laplacian(), 3, 400).unwrap();
    assert!(sys.orthonormality_defect() < 1e-12);
    for k in 0..3 {
        for &x in &[0.1, 0.37, 0.5, 0.81] {
            let exact = 2f64.sqrt() * ((k + 1) as f64 * PI * x).sin();
            assert!(
                (sys.eigenfunction(k, x).unwrap() - exact).abs() < 2e-4,
                "mode {k} at {x}"
            );
        }
    }
}

#[test]
fn coercivity_and_domain() {
    // c0 = pi^2 is not admissible
    assert!(OperatorSpec::constant(1.0, 1.0, -PI * PI).is_err());
    assert!(OperatorSpec::constant(1.0, 1.0, -9.0).is_ok());
    assert!(OperatorSpec::constant(-1.0, 1.0, 0.0).is_err());
    assert!(OperatorSpec::constant(1.0, 0.0, 0.0).is_err());
    let sys = EigenSystem::analytic(&laplacian(), 4, 64).unwrap();
    assert!(sys.eigenfunction(4, 0.5).is_err());
    assert!(sys.eigenfunction(0, 1.5).is_err());
    assert!(EigenSystem::finite_difference(&laplacian(), 10, 8).is_err());
}

#[test]
fn parseval_for_finite_expansion() {
    let sys = EigenSystem::analytic(&laplacian(), 6, 512).unwrap();
    let coeffs = [0.4, -0.2, 0.0, 0.05, 0.01, -0.3];
    let grid = sys.grid().to_vec();
    let field = sys.synthesize(&coeffs, &grid).unwrap();
    let back = sys.project(&field).unwrap();
    for (a, b) in coeffs.iter().zip(&back) {
        assert!((a - b).abs() < 1e-13);
    }
    assert!(sys.parseval_defect(&field, &back).unwrap().abs() < 1e-13);
    let tail = sys.tail_indicator(&coeffs);
    assert!((tail - (36.0 * PI * PI * 0.3).powi(2)).abs() < 1e-9);
}
