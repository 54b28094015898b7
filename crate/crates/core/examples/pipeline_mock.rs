//! The full design loop offline: mock responses, the line scenario and a
//! short training schedule. Artifacts go to a temporary run directory
//! unless a path is given.
//!
//! `cargo run --release --example pipeline_mock [run_root]`

use std::path::{Path, PathBuf};
use std::sync::Arc;

use pcrd::llm::{Gateway, MockProvider};
use pcrd::pipeline::{run_pipeline, EnvSource, PipelineConfig, RunHooks};
use pcrd::trainer::TrainConfig;

fn main() {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("pcrd-example-{}", std::process::id())));
    let config = PipelineConfig {
        n_iter: 3,
        k: 2,
        seed: 7,
        source: EnvSource::Line,
        train: TrainConfig {
            max_training_episodes: 400,
            eval_every_episodes: 4,
            ..TrainConfig::default()
        },
        run_root: root.clone(),
        ..PipelineConfig::default()
    };
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mock_run");
    let gateway = Gateway::new(Arc::new(MockProvider::from_dir(&dir).unwrap()), 1.0, 4);
    let m = run_pipeline(&config, &gateway, RunHooks::default()).unwrap_or_else(|e| {
        eprintln!("{}", e.error_line());
        std::process::exit(e.exit_code());
    });
    println!("run directory: {}", root.join(&m.run_id).display());
    for it in &m.iterations {
        let sel = it.selection.as_ref().unwrap();
        let origins: Vec<String> = it.candidates.iter().map(|c| c.origin.to_string()).collect();
        println!(
            "iteration {}: pool [{}] -> cand_{} (max J {:.1}{})",
            it.iteration,
            origins.join(", "),
            sel.best_index,
            sel.max_j,
            if sel.fallback { ", fallback" } else { "" }
        );
    }
    println!(
        "generation calls {}, trainings {}",
        m.counters.generation_calls, m.counters.trainings
    );
    print!("final best:\n{}", m.final_best.unwrap().source);
}
