mod common;

use std::f64::consts::PI;

use common::{two_segment, unit_operator};
use fracstep_core::l1::solve_full_l1_fd;
use fracstep_core::{gamma_fn, relaxation, solve_mode_l1, L1Grid, OrderSchedule, SolutionField};

#[test]
fn constant_order_converges_to_relaxation() {
    let s = OrderSchedule::constant(0.6, 1.0).unwrap();
    let lam = PI * PI;
    let exact = relaxation(0.6, lam, 1.0).unwrap();
    let g = L1Grid::new(&s, 2f64.powi(-12)).unwrap();
    let u = solve_mode_l1(lam, |_| 0.0, &s, 1.0, &g).unwrap();
    assert!((u[g.steps()] - exact).abs() <= 1e-3);
}

#[test]
fn constant_order_decay_is_positive_and_monotone() {
    for &beta in &[0.2, 0.5, 0.9] {
        for &lam in &[1.0, 50.0, 2000.0] {
            for &k in &[4, 7] {
                let s = OrderSchedule::constant(beta, 1.0).unwrap();
                let g = L1Grid::new(&s, 2f64.powi(-k)).unwrap();
                let u = solve_mode_l1(lam, |_| 0.0, &s, 1.0, &g).unwrap();
                assert!(u.iter().all(|v| *v > 0.0));
                assert!(u.windows(2).all(|w| w[1] <= w[0]), "beta {beta} lambda {lam}");
            }
        }
    }
}

#[test]
fn self_convergence_is_at_least_first_order() {
    let schedules = [
        OrderSchedule::new(vec![0.0, 0.5, 1.0], vec![0.3, 0.8]).unwrap(),
        OrderSchedule::new(vec![0.0, 0.25, 0.75, 1.0], vec![0.7, 0.2, 0.5]).unwrap(),
    ];
    for s in &schedules {
        let run = |k: i32| {
            let g = L1Grid::new(s, 2f64.powi(-k)).unwrap();
            solve_mode_l1(PI * PI, |t| t.cos(), s, 1.0, &g).unwrap()
        };
        let (a, b, c) = (run(7), run(8), run(9));
        // at T; the layer at t = tau only converges like tau^beta
        let d1 = (a[a.len() - 1] - b[b.len() - 1]).abs();
        let d2 = (b[b.len() - 1] - c[c.len() - 1]).abs();
        let order = (d1 / d2).log2();
        assert!(order >= 1.0, "order {order}");
    }
}

#[test]
fn refinement_approaches_the_spectral_solve() {
    let spec = two_segment();
    let field = SolutionField::solve(&spec).unwrap();
    let times: Vec<f64> = (1..=32).map(|k| k as f64 / 32.0).collect();
    let exact = field.mode_trajectory(0, &times).unwrap();
    let mut prev = f64::INFINITY;
    for k in 6..=10 {
        let g = L1Grid::new(&spec.schedule, 2f64.powi(-k)).unwrap();
        let u = solve_mode_l1(PI * PI, |_| 0.0, &spec.schedule, 1.0, &g).unwrap();
        let stride = g.steps() / 32;
        let dev = (0..32)
            .map(|i| (u[(i + 1) * stride] - exact[i]).abs())
            .fold(0.0, f64::max);
        assert!(dev < prev, "tau 2^-{k}: {dev} after {prev}");
        prev = dev;
    }
}

#[test]
fn full_solve_of_a_pure_mode() {
    let s = OrderSchedule::constant(0.5, 1.0).unwrap();
    let g = L1Grid::new(&s, 2f64.powi(-7)).unwrap();
    let p = 63;
    let op = unit_operator();
    let rows = solve_full_l1_fd(&op, &s, |x| (PI * x).sin(), |_, _| 0.0, &g, p).unwrap();
    let h = 1.0 / (p + 1) as f64;
    let lam_h = 2.0 * (1.0 - (PI * h).cos()) / (h * h);
    let modal = solve_mode_l1(lam_h, |_| 0.0, &s, 1.0, &g).unwrap();
    let x = op.grid(p);
    for (m, row) in rows.iter().enumerate() {
        // discrete projection onto sin(pi x) normalized on the grid
        let num: f64 = (1..=p).map(|i| row[i] * (PI * x[i]).sin()).sum();
        let den: f64 = (1..=p).map(|i| (PI * x[i]).sin().powi(2)).sum();
        assert!((num / den - modal[m]).abs() <= 1e-6, "step {m}");
    }
}

#[test]
fn manufactured_linear_in_time() {
    // u = (1 + t) sin(pi x): the L1 quotient is exact for linear u
    let beta = 0.5;
    let s = OrderSchedule::constant(beta, 1.0).unwrap();
    let g = L1Grid::new(&s, 2f64.powi(-6)).unwrap();
    let c = 1.0 / gamma_fn(2.0 - beta).unwrap();
    let f = |x: f64, t: f64| (c * t.powf(1.0 - beta) + PI * PI * (1.0 + t)) * (PI * x).sin();
    let p = 127;
    let rows = solve_full_l1_fd(&unit_operator(), &s, |x| (PI * x).sin(), f, &g, p).unwrap();
    let x = unit_operator().grid(p);
    let err = rows
        .iter()
        .enumerate()
        .flat_map(|(m, row)| {
            let t = g.time(m);
            row.iter()
                .zip(&x)
                .map(move |(u, xi)| (u - (1.0 + t) * (PI * xi).sin()).abs())
        })
        .fold(0.0, f64::max);
    let h = 1.0 / (p + 1) as f64;
    assert!(err <= 2.0 * h * h, "{err}");
}

#[test]
fn grid_must_contain_breakpoints() {
    let s = OrderSchedule::new(vec![0.0, 0.3, 1.0], vec![0.3, 0.8]).unwrap();
    assert!(L1Grid::new(&s, 1.0 / 64.0).is_err());
    assert!(L1Grid::new(&s, 0.1).is_ok());
    let g = L1Grid::new(&s, 0.1).unwrap();
    assert!(solve_full_l1_fd(&unit_operator(), &s, |_| 0.0, |_, _| 0.0, &g, 8).is_err());
}
