#![allow(dead_code)]

use std::sync::Arc;

use fracstep_core::{Backend, OperatorSpec, OrderSchedule, ProblemSpec, SeparableSource, SpatialProfile, TimeProfile};
use serde_json::Value;

pub fn oracle() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/oracle_values.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().unwrap(),
        Value::Number(n) => n.as_f64().unwrap(),
        _ => panic!("not a number: {v}"),
    }
}

/// Rows `(alpha, beta, z, value)` of the Mittag-Leffler oracle table.
pub fn ml_table() -> Vec<(f64, f64, f64, f64)> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/ml_oracle.csv");
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2], v[3])
        })
        .collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) with bisection of the worst interval.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..5000 {
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err < tol {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// `int_0^b s^p g(s) ds` with singularity subtraction: the power times
/// `g(0) + g'(0) s` is integrated exactly, the bounded remainder adaptively.
pub fn adaptive_singular<F: Fn(f64) -> f64>(p: f64, g: F, b: f64, tol: f64) -> f64 {
    let g0 = g(0.0);
    let h = 1e-6;
    let g1 = (g(h) - g0) / h;
    let exact = g0 * b.powf(p + 1.0) / (p + 1.0) + g1 * b.powf(p + 2.0) / (p + 2.0);
    exact
        + adaptive(
            |s| {
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(p) * (g(s) - g0 - g1 * s)
                }
            },
            0.0,
            b,
            tol,
        )
}

pub fn unit_operator() -> OperatorSpec<f64> {
    OperatorSpec::constant(1.0, 1.0, 0.0).unwrap()
}

/// Unit interval, analytic Dirichlet Laplacian, `f = 0`, `u_0 = sum c_n X_n`.
pub fn homogeneous(breakpoints: Vec<f64>, orders: Vec<f64>, initial: Vec<f64>) -> ProblemSpec<f64> {
    let s = OrderSchedule::new(breakpoints, orders).unwrap();
    let eps = ProblemSpec::default_regularity(&s);
    let n = initial.len();
    ProblemSpec::new(
        unit_operator(),
        Backend::Analytic,
        s,
        SpatialProfile::Modes(initial),
        Arc::new(SeparableSource::zero()),
        eps,
        n,
        256,
    )
    .unwrap()
}

/// As [`homogeneous`] with the source `X_1(x) h(t)`.
pub fn forced(breakpoints: Vec<f64>, orders: Vec<f64>, initial: Vec<f64>, time: TimeProfile<f64>) -> ProblemSpec<f64> {
    let s = OrderSchedule::new(breakpoints, orders).unwrap();
    let eps = ProblemSpec::default_regularity(&s);
    let n = initial.len();
    let src = SeparableSource::new(vec![(SpatialProfile::Modes(vec![1.0]), time)]);
    ProblemSpec::new(
        unit_operator(),
        Backend::Analytic,
        s,
        SpatialProfile::Modes(initial),
        Arc::new(src),
        eps,
        n,
        256,
    )
    .unwrap()
}

/// Problem used by the oracle comparison: two segments, orders 0.3 and 0.8.
pub fn two_segment() -> ProblemSpec<f64> {
    homogeneous(vec![0.0, 0.5, 1.0], vec![0.3, 0.8], vec![1.0, 0.5])
}
