//! One evolution round with scripted replies: each strategy's candidate is
//! printed with its structural diff against the parent.
//!
//! `cargo run --example evoleap_mock`

use std::sync::Arc;

use pcrd::dsl::compile;
use pcrd::evoleap::{build_feedback, evolve, EvolutionStrategy};
use pcrd::filter::{curve_stats, FilterConfig};
use pcrd::llm::{ChatMessage, Gateway, MockProvider};
use pcrd::trainer::{CurvePoint, TrainingCurve};

fn main() {
    let best = compile("term platoon_km weight 1.0: step_platoon_km\nterm idle weight -0.5: waited_this_step").unwrap();
    let curve = TrainingCurve {
        points: (0..100)
            .map(|i| CurvePoint {
                eval_index: i,
                j: 40.0 + 3.0 * (i as f64).min(60.0),
                mean_step_reward: 0.1 * i as f64,
            })
            .collect(),
    };
    let stats = curve_stats(&curve.values(), &FilterConfig::default()).unwrap();
    let feedback = build_feedback(&curve, &stats);
    println!("feedback sent with the parent program:\n{}\n", feedback.text);

    let block = |s: &str| format!("```rdsl\n{s}\n```");
    let replies = [
        block("term platoon_km weight 1.0: step_platoon_km\nterm idle weight -0.5: waited_this_step\nterm pair weight 2: in_platoon"),
        block("term platoon_km weight 1.0: step_platoon_km"),
        block("term platoon_km weight 3.0: step_platoon_km\nterm idle weight -0.1: waited_this_step"),
        block("term shared weight 5: in_platoon * progress_fraction"),
    ];
    let gateway = Gateway::new(Arc::new(MockProvider::from_responses(replies)), 1.0, 4);
    let base = vec![ChatMessage::system("You design reward functions.")];
    let outcomes = evolve(&base, &best, &feedback, &EvolutionStrategy::DEFAULT_SET, 1, &gateway).unwrap();
    for o in outcomes {
        for c in &o.candidates {
            let (a, r, w, b) = c.diff.counts();
            println!("{} -> added {a}, removed {r}, reweighted {w}, bodies changed {b}", o.strategy);
        }
    }
}
