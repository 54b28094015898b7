//! Runs the analysis dialogue and initial generation against the bundled
//! mock script, then prints the admitted programs.
//!
//! `cargo run --example air_mock`

use std::path::Path;
use std::sync::Arc;

use pcrd::air::{build_analysis_dialogue, generate_initial, GenerationMode, TaskText};
use pcrd::dsl::pretty_print;
use pcrd::llm::{Gateway, MockProvider};
use pcrd::sim::{render_environment_brief, EnvConfig, Objective, Scenario};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mock_run");
    let gateway = Gateway::new(Arc::new(MockProvider::from_dir(&dir).unwrap()), 1.0, 4);
    let env = EnvConfig::default();
    let brief = render_environment_brief(&env);
    let dialogue = build_analysis_dialogue(
        &brief,
        &TaskText::standard(Scenario::Wait, Objective::SingleObject),
        4,
        GenerationMode::Batch,
    );
    for turn in &dialogue.turns {
        println!("[{}] {} chars", turn.label, turn.content.len());
    }
    let out = generate_initial(&dialogue, &gateway).unwrap();
    println!("\n{} calls, {} admitted, {} rejected", gateway.transcript().len(), out.candidates.len(), out.rejections.len());
    for (i, c) in out.candidates.iter().enumerate() {
        print!("\n# candidate {i}\n{}", pretty_print(&c.program));
    }
}
