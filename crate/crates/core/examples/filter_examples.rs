//! Runs the convergence filter on three textbook curves.
//!
//! `cargo run --example filter_examples`

use pcrd::filter::{curve_stats, filter_and_select, FilterConfig};

fn main() {
    let cfg = FilterConfig::default();
    let t = |f: fn(f64) -> f64| (1..=cfg.length).map(|i| f(i as f64)).collect::<Vec<f64>>();
    let curves = vec![
        ("constant 5", t(|_| 5.0)),
        ("J = t", t(|x| x)),
        ("min(t, 60)", t(|x| x.min(60.0))),
    ];
    for (name, c) in &curves {
        let s = curve_stats(c, &cfg).unwrap();
        println!(
            "{name:<11} means {:.2} -> {:.2}  std ratio {:.4}  slope {:+}  passes {}",
            s.early_mean,
            s.late_mean,
            if s.early_std > 0.0 { s.late_std / s.early_std } else { 0.0 },
            s.slope_sign,
            s.passes()
        );
    }
    let values: Vec<Vec<f64>> = curves.into_iter().map(|(_, c)| c).collect();
    let sel = filter_and_select(&values, &cfg).unwrap();
    print!("\n{}", sel.report());
}
