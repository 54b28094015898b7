//! Trains the line scenario with an `in_platoon` reward on five seeds and
//! compares the greedy policy against a uniform random policy.

use std::time::Instant;

use pcrd::dsl::compile;
use pcrd::sim::scenarios::line_scenario;
use pcrd::sim::Objective;
use pcrd::trainer::{evaluate_policy, random_baseline, train, TrainConfig};

fn main() {
    let factory = line_scenario(Objective::SingleObject);
    let program = compile("term p weight 1.0: in_platoon").expect("valid program");
    let baseline = random_baseline(&factory, &program, 500, 99).expect("baseline");
    println!("random baseline J = {baseline:.2}");
    for seed in 0..5 {
        let start = Instant::now();
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let out = train(&factory, &program, &cfg).expect("training");
        let j = evaluate_policy(&factory, &out.q, &program, 10, seed + 1000).expect("eval");
        let last: Vec<String> = out.curve.values()[95..].iter().map(|v| format!("{v:.0}")).collect();
        println!(
            "seed {seed}: greedy J = {j:.2} ({:+.0}%), curve tail [{}], states {}, {:.1?}",
            100.0 * (j / baseline - 1.0),
            last.join(" "),
            out.q.len(),
            start.elapsed()
        );
    }
}
