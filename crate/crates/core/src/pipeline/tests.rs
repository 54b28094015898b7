use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::*;
use crate::evoleap::EvolutionStrategy;
use crate::llm::{Gateway, MockProvider};
use crate::trainer::TrainConfig;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mock_run")
}

fn gateway() -> Gateway {
    Gateway::new(Arc::new(MockProvider::from_dir(&fixture_dir()).unwrap()), 1.0, 4)
}

fn small(root: &Path, n_iter: usize, k: usize) -> PipelineConfig {
    PipelineConfig {
        n_iter,
        k,
        seed: 7,
        worker_count: 2,
        source: EnvSource::Line,
        train: TrainConfig {
            max_training_episodes: 200,
            eval_every_episodes: 2,
            eval_rollouts_per_point: 1,
            ..TrainConfig::default()
        },
        run_root: root.to_path_buf(),
        ..PipelineConfig::default()
    }
}

#[test]
fn shape_of_a_three_iteration_run() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run_pipeline(&small(tmp.path(), 3, 2), &gateway(), RunHooks::default()).unwrap();
    assert!(m.is_complete());
    assert_eq!(m.pool_sizes(), vec![2, 5, 5]);
    assert_eq!(m.counters.trainings, 12);
    assert_eq!(m.counters.generation_calls, 9);
    assert_eq!(m.counters.analysis_calls, 5);
    assert_eq!(m.iterations[2].evolution.len(), 0);
    assert_eq!(m.iterations[1].candidates[0].origin, Origin::Best);
    assert_eq!(
        m.iterations[1].candidates[1].origin,
        Origin::Strategy(EvolutionStrategy::BranchAugment)
    );
    assert!(m.final_best.is_some());
    let run_dir = tmp.path().join(&m.run_id);
    for it in &m.iterations {
        for c in &it.candidates {
            for p in [&c.source_path, &c.transcript_path, &c.diff_path] {
                assert!(run_dir.join(p).exists(), "{p}");
            }
            assert!(run_dir.join(c.curve_path.as_ref().unwrap()).exists());
        }
        let sel = it.selection.as_ref().unwrap();
        let replay = replay_selection(&run_dir, it, &m.config.filter).unwrap();
        assert_eq!(replay, Some((sel.best_index, sel.fallback)));
    }
    assert_eq!(RunManifest::load(&run_dir).unwrap(), m);
}

#[test]
fn identical_manifests_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = run_pipeline(&small(a.path(), 2, 2), &gateway(), RunHooks::default()).unwrap();
    let mb = run_pipeline(&small(b.path(), 2, 2), &gateway(), RunHooks::default()).unwrap();
    assert_eq!(ma.without_timings(), mb.without_timings());
}

#[test]
fn resume_matches_uninterrupted_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let full = run_pipeline(&small(a.path(), 3, 2), &gateway(), RunHooks::default()).unwrap();
    let hooks = RunHooks {
        interrupt_after_training: Some(2),
    };
    let err = run_pipeline(&small(b.path(), 3, 2), &gateway(), hooks).unwrap_err();
    assert!(matches!(err, PipelineError::Interrupted(_)));
    let run_dir = b.path().join(&full.run_id);
    let partial = RunManifest::load(&run_dir).unwrap();
    assert_eq!(partial.iterations.len(), 1);
    let resumed = resume_pipeline(&run_dir, &gateway(), RunHooks::default()).unwrap();
    assert_eq!(resumed.without_timings(), full.without_timings());
    assert_eq!(resumed.timings.resumed_at.len(), 1);
    let again = resume_pipeline(&run_dir, &gateway(), RunHooks::default()).unwrap();
    assert_eq!(again, resumed);
}

#[test]
fn single_iteration_skips_evolution() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run_pipeline(&small(tmp.path(), 1, 2), &gateway(), RunHooks::default()).unwrap();
    assert_eq!(m.pool_sizes(), vec![2]);
    assert_eq!(m.counters.generation_calls, 1);
    assert!(m.pending_pool.is_empty());
}

#[test]
fn reused_best_curve_is_not_retrained() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        reuse_best_curve: true,
        ..small(tmp.path(), 2, 2)
    };
    let m = run_pipeline(&cfg, &gateway(), RunHooks::default()).unwrap();
    assert_eq!(m.counters.trainings, 2 + 4);
    assert!(m.iterations[1].candidates[0].reused_curve);
}

#[test]
fn existing_run_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path(), 1, 1);
    run_pipeline(&cfg, &gateway(), RunHooks::default()).unwrap();
    let e = run_pipeline(&cfg, &gateway(), RunHooks::default()).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    assert!(e.error_line().starts_with("CONFIG: "));
}

#[test]
fn all_failing_candidates_abort() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = "```rdsl\nterm x weight 1: 1 / (step_index - 1)\n```";
    let mut responses: Vec<String> = (0..5).map(|i| format!("answer {i}")).collect();
    responses.push(format!("{bad}\n{bad}"));
    let gw = Gateway::new(Arc::new(MockProvider::from_responses(responses)), 1.0, 1);
    let e = run_pipeline(&small(tmp.path(), 2, 2), &gw, RunHooks::default()).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let run_dir = tmp.path().join(small(tmp.path(), 2, 2).run_id());
    let m = RunManifest::load(&run_dir).unwrap();
    assert!(matches!(m.status, RunStatus::Aborted { iteration: 1, .. }));
    assert_eq!(m.iterations[0].candidates.iter().filter(|c| c.failure.is_some()).count(), 2);
}

#[test]
fn exhausted_mock_is_a_transport_class_error() {
    let tmp = tempfile::tempdir().unwrap();
    let gw = Gateway::new(Arc::new(MockProvider::from_responses(["only one"])), 1.0, 1);
    let e = run_pipeline(&small(tmp.path(), 1, 1), &gw, RunHooks::default()).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    assert!(e.error_line().starts_with("MOCK: "), "{}", e.error_line());
}

#[test]
fn export_writes_flat_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run_pipeline(&small(tmp.path(), 2, 2), &gateway(), RunHooks::default()).unwrap();
    let run_dir = tmp.path().join(&m.run_id);
    let out = export_run(&run_dir, &tmp.path().join("export")).unwrap();
    let curves = std::fs::read_to_string(&out[0]).unwrap();
    assert!(curves.starts_with("iteration,candidate,origin,program_hash,eval_index,j,mean_step_reward\n"));
    assert_eq!(curves.lines().count(), 1 + 7 * 100);
    let cands = std::fs::read_to_string(&out[1]).unwrap();
    assert_eq!(cands.lines().count(), 1 + 7);
    let selected = cands.lines().skip(1).filter(|l| l.split(',').nth(16) == Some("true")).count();
    assert_eq!(selected, 2);
}
