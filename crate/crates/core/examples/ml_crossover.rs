//! Per-regime accuracy of the Mittag-Leffler evaluator against the mpmath table.
//!
//! `cargo run --release -p fracstep-core --example ml_crossover`

use std::collections::BTreeMap;

use fracstep_core::{MLParams, MittagLeffler};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/ml_oracle.csv");
    let text = std::fs::read_to_string(path).expect("oracle table");
    // regime -> (count, max error, min |z|^(1/alpha), max |z|^(1/alpha))
    let mut stats: BTreeMap<String, (usize, f64, f64, f64)> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (a, b, z, exact) = (v[0], v[1], v[2], v[3]);
        let m = MittagLeffler::new(MLParams::new(a, b).unwrap());
        let (val, regime) = m.eval_with_regime(z).unwrap();
        let w = (-z).powf(1.0 / a);
        let key = format!("{regime:?}");
        let e = stats.entry(key).or_insert((0, 0.0, f64::INFINITY, f64::NEG_INFINITY));
        e.0 += 1;
        e.1 = e.1.max((val - exact).abs());
        e.2 = e.2.min(w);
        e.3 = e.3.max(w);
    }
    println!(
        "{:<11} {:>6} {:>11} {:>11} {:>11}",
        "regime", "points", "max error", "min w", "max w"
    );
    for (k, (n, err, lo, hi)) in stats {
        println!("{k:<11} {n:>6} {err:>11.2e} {lo:>11.3e} {hi:>11.3e}");
    }
    let m = MittagLeffler::<f64>::new(MLParams::new(0.5, 1.0).unwrap());
    println!("tolerance {:.2e}", m.tolerance());
}
