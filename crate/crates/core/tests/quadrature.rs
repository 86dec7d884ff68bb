mod common;

use common::{adaptive_singular, num, oracle};
use fracstep_core::beta_fn;
use fracstep_core::quadrature::{
    duhamel_convolve, gauss_jacobi, history_integral, jacobi_weighted_integral, tanh_sinh, HistoryRule,
    SingularIntegrand, SourceMesh,
};
use fracstep_core::special::rgamma;

#[test]
fn jacobi_unit_weight_is_beta() {
    for &(p, q) in &[(-0.3, 0.0), (-0.7, -0.55), (0.2, -0.9), (-0.95, 1.5)] {
        let f = SingularIntegrand {
            a: 0.25,
            b: 1.75,
            p,
            q,
            smooth: |_: f64| 1.0,
        };
        let v = jacobi_weighted_integral(&f, 6).unwrap();
        let expect = beta_fn(p + 1.0, q + 1.0).unwrap() * 1.5f64.powf(p + q + 1.0);
        assert!((v - expect).abs() < 1e-10 * expect, "({p}, {q})");
    }
}

#[test]
fn jacobi_rejects_bad_exponents() {
    assert!(gauss_jacobi::<f64>(4, -1.0, 0.0).is_err());
    let f = SingularIntegrand {
        a: 1.0,
        b: 1.0,
        p: 0.0,
        q: 0.0,
        smooth: |_: f64| 1.0,
    };
    assert!(jacobi_weighted_integral(&f, 4).is_err());
}

#[test]
fn tanh_sinh_endpoint_singularity() {
    let (v, _) = tanh_sinh(|s: f64| s.powf(-0.3) * s.cos(), 0.0, 1.0, 1e-13, 9);
    assert!((v - num(&oracle()["jacobi_cos_m0_3"])).abs() < 1e-11);
}

#[test]
fn history_is_additive_over_a_split() {
    let vp = |s: f64| s.powf(-0.4) * s.cos();
    let (tk, tk1, t) = (0.0, 0.6, 0.9);
    let beta = 0.7;
    let whole = history_integral(beta, (tk, tk1), -0.4, |l| Ok(vp(l)), t).unwrap();
    let m = 0.25;
    let a = history_integral(beta, (tk, m), -0.4, |l| Ok(vp(l)), t).unwrap();
    let b = history_integral(beta, (m, tk1), 0.0, |l| Ok(vp(m + l)), t).unwrap();
    assert!((whole - a - b).abs() < 1e-8, "{whole} vs {}", a + b);
    // independent check of the whole integral
    let direct = adaptive_singular(-0.4, |s| s.cos() * (t - s).powf(-beta), tk1, 1e-13) * rgamma(1.0 - beta);
    assert!((whole - direct).abs() < 1e-9);
}

#[test]
fn history_rule_current_segment() {
    // d = 0: int_0^h l^e (h - l)^p dl = B(e+1, p+1) h^{e+p+1}
    let (h, e, p) = (0.3f64, -0.6, -0.45);
    let rule = HistoryRule::new(h, e, 12).unwrap();
    let ones = vec![1.0; rule.len()];
    let v = rule.integrate(&ones, 0.0, p);
    let expect = beta_fn(e + 1.0, p + 1.0).unwrap() * h.powf(e + p + 1.0);
    assert!((v - expect).abs() < 1e-11 * expect);
}

#[test]
fn convolution_is_linear() {
    let mesh = SourceMesh::<f64>::new(0.8, 32, 3.0).unwrap();
    let f: Vec<f64> = mesh.sample_offsets().iter().map(|s| s.sqrt() + 1.0).collect();
    let g: Vec<f64> = mesh.sample_offsets().iter().map(|s| (3.0 * s).sin()).collect();
    let (a, b) = (2.5, -0.75);
    let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
    for &tau in &[0.8, 0.31, 1e-4] {
        let cf = duhamel_convolve(0.6, 7.0, &mesh, &f, tau).unwrap();
        let cg = duhamel_convolve(0.6, 7.0, &mesh, &g, tau).unwrap();
        let cm = duhamel_convolve(0.6, 7.0, &mesh, &mix, tau).unwrap();
        assert!((cm - a * cf - b * cg).abs() < 1e-14 * (cf.abs() + cg.abs()).max(1.0));
    }
}

#[test]
fn constant_source_is_exact_on_every_mesh() {
    let cases = oracle()["duhamel_constant_source"].as_array().unwrap().clone();
    let c = &cases[0];
    let (a, lam, tau) = (
        c["alpha"].as_f64().unwrap(),
        c["lambda"].as_f64().unwrap(),
        c["tau"].as_f64().unwrap(),
    );
    let o = num(&c["value"]);
    for cells in [1, 2, 4, 8, 16, 32] {
        let mesh = SourceMesh::<f64>::new(tau, cells, 2.0).unwrap();
        let ones = vec![1.0; mesh.sample_offsets().len()];
        let v = duhamel_convolve(a, lam, &mesh, &ones, tau).unwrap();
        assert!((v - o).abs() < 1e-12, "{cells} cells: {}", v - o);
    }
}

#[test]
fn refinement_order_on_square_root_source() {
    let o = num(&oracle()["duhamel_sqrt_source_0_5_2_0_7"]);
    let errs: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&cells| {
            let mesh = SourceMesh::<f64>::new(0.7, cells, 2.0).unwrap();
            let vals: Vec<f64> = mesh.sample_offsets().iter().map(|s| s.sqrt()).collect();
            (duhamel_convolve(0.5, 2.0, &mesh, &vals, 0.7).unwrap() - o).abs()
        })
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0]);
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.5, "order {order}, errors {errs:?}");
    }
}

#[test]
fn mesh_rejects_bad_input() {
    assert!(SourceMesh::<f64>::new(0.0, 4, 2.0).is_err());
    assert!(SourceMesh::<f64>::new(1.0, 0, 2.0).is_err());
    let mesh = SourceMesh::<f64>::new(1.0, 4, 2.0).unwrap();
    assert!(duhamel_convolve(0.5, 1.0, &mesh, &[1.0, 2.0], 0.5).is_err());
    let ones = vec![1.0; mesh.sample_offsets().len()];
    assert!(duhamel_convolve(0.5, 1.0, &mesh, &ones, 1.5).is_err());
    assert!(HistoryRule::<f64>::new(1.0, -1.0, 8).is_err());
}
