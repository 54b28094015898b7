use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use sha2::{Digest, Sha256};

use super::manifest::{
    AirRecord, CandidateRecord, Counters, EvolutionRecord, FinalBest, IterationRecord, Origin, PoolEntry, RunManifest,
    RunStatus, SelectionRecord, Timings, MANIFEST_FILE, MANIFEST_FORMAT,
};
use super::pool::{candidate_seed, train_indexed};
use super::{PipelineConfig, PipelineError};
use crate::air::prompts::PROMPT_VERSION;
use crate::air::{build_analysis_dialogue, generate_initial, TaskText};
use crate::dsl::{compile, pretty_print, RewardProgram};
use crate::evoleap::{build_feedback, evolve};
use crate::filter::{curve_stats, filter_and_select, FilterConfig, Selection};
use crate::llm::{CallKind, ChatMessage, Gateway, TranscriptEntry};
use crate::sim::{brief_hash, render_environment_brief};
use crate::trainer::{TrainError, TrainingCurve};

const AIR_DIR: &str = "air";
const BUFFER_FILE: &str = "air/buffer.json";
const AIR_TRANSCRIPT_FILE: &str = "air/transcript.json";

/// Test hooks for simulating a crash.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunHooks {
    /// Stop with [`PipelineError::Interrupted`] after training this
    /// iteration, before selection is persisted.
    pub interrupt_after_training: Option<usize>,
}

/// Short hex hash of a program's canonical text.
pub fn program_hash(program: &RewardProgram) -> String {
    hex::encode(&Sha256::digest(pretty_print(program).as_bytes())[..8])
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    write(path, &(serde_json::to_string_pretty(value).expect("serialisable") + "\n"))
}

fn cand_dir(iteration: usize, index: usize) -> String {
    format!("iter_{iteration}/cand_{index}")
}

fn count_kind(entries: &[TranscriptEntry], kind: CallKind) -> usize {
    entries.iter().filter(|e| e.kind == kind).count()
}

/// Runs the full loop in a fresh run directory.
pub fn run_pipeline(config: &PipelineConfig, gateway: &Gateway, hooks: RunHooks) -> Result<RunManifest, PipelineError> {
    config.validate()?;
    let run_id = config.run_id();
    let run_dir = config.run_root.join(&run_id);
    if run_dir.join(MANIFEST_FILE).exists() {
        return Err(PipelineError::Config(format!(
            "{} already holds a run; use resume",
            run_dir.display()
        )));
    }
    fs::create_dir_all(&run_dir).map_err(|e| PipelineError::io(&run_dir, e))?;
    let snapshot = PipelineConfig {
        run_root: PathBuf::new(),
        run_id: None,
        ..config.clone()
    };
    let brief = render_environment_brief(&config.env);
    let started = now();
    let mut manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        run_id,
        config_hash: config.hash(),
        config: snapshot,
        brief_hash: brief_hash(&brief),
        prompt_version: PROMPT_VERSION.into(),
        provider: gateway.describe(),
        status: RunStatus::Running,
        air: None,
        iterations: Vec::new(),
        pending_pool: Vec::new(),
        next_ordinal: 0,
        counters: Counters::default(),
        final_best: None,
        timings: Timings {
            started_at: started.clone(),
            updated_at: started,
            ..Timings::default()
        },
    };
    manifest.save(&run_dir)?;
    drive(&mut manifest, &run_dir, gateway, hooks)?;
    Ok(manifest)
}

/// Continues an interrupted run from its last checkpoint. Work after the
/// checkpoint is redone with the same seeds and call ordinals.
pub fn resume_pipeline(run_dir: &Path, gateway: &Gateway, hooks: RunHooks) -> Result<RunManifest, PipelineError> {
    let mut manifest = RunManifest::load(run_dir)?;
    match &manifest.status {
        RunStatus::Completed => return Ok(manifest),
        RunStatus::Aborted { iteration, reason } => {
            return Err(PipelineError::Abort {
                iteration: *iteration,
                reason: reason.clone(),
            })
        }
        RunStatus::Running => {}
    }
    manifest.config.validate()?;
    manifest.timings.resumed_at.push(now());
    if manifest.air.is_none() {
        manifest.counters = Counters::default();
        manifest.next_ordinal = 0;
    }
    gateway.set_next_ordinal(manifest.next_ordinal);
    drive(&mut manifest, run_dir, gateway, hooks)?;
    Ok(manifest)
}

fn checkpoint(manifest: &mut RunManifest, run_dir: &Path, gateway: &Gateway) -> Result<(), PipelineError> {
    manifest.next_ordinal = gateway.next_ordinal();
    manifest.timings.updated_at = now();
    manifest.save(run_dir)
}

fn drive(manifest: &mut RunManifest, run_dir: &Path, gateway: &Gateway, hooks: RunHooks) -> Result<(), PipelineError> {
    let config = manifest.config.clone();
    let factory = config.env_factory()?;
    if manifest.air.is_none() {
        let t0 = Instant::now();
        initialize(manifest, run_dir, gateway, &config)?;
        manifest.timings.air_seconds = t0.elapsed().as_secs_f64();
        checkpoint(manifest, run_dir, gateway)?;
    }
    let buffer: Vec<ChatMessage> = serde_json::from_str(&read(&run_dir.join(BUFFER_FILE))?)
        .map_err(|e| PipelineError::Config(format!("{BUFFER_FILE}: {e}")))?;

    for iteration in manifest.iterations.len() + 1..=config.n_iter {
        let t0 = Instant::now();
        let record = run_iteration(manifest, run_dir, gateway, &config, &factory, &buffer, iteration, hooks);
        let (record, next_pool) = match record {
            Ok(r) => r,
            Err(PipelineError::Abort { iteration, reason }) => {
                manifest.status = RunStatus::Aborted {
                    iteration,
                    reason: reason.clone(),
                };
                checkpoint(manifest, run_dir, gateway)?;
                return Err(PipelineError::Abort { iteration, reason });
            }
            Err(e) => return Err(e),
        };
        manifest.counters.trainings += record.trainings;
        manifest.iterations.push(record);
        manifest.pending_pool = next_pool;
        manifest.timings.iteration_seconds.push(t0.elapsed().as_secs_f64());
        checkpoint(manifest, run_dir, gateway)?;
    }

    let last = manifest.iterations.last().expect("n_iter >= 1");
    let sel = last.selection.as_ref().expect("completed iterations have a selection");
    let cand = &last.candidates[sel.best_index];
    manifest.final_best = Some(FinalBest {
        iteration: last.iteration,
        program_hash: sel.program_hash.clone(),
        source_path: cand.source_path.clone(),
        source: read(&run_dir.join(&cand.source_path))?,
        max_j: sel.max_j,
    });
    manifest.status = RunStatus::Completed;
    checkpoint(manifest, run_dir, gateway)
}

/// Analysis dialogue and initial generation; fills the first pool.
fn initialize(
    manifest: &mut RunManifest,
    run_dir: &Path,
    gateway: &Gateway,
    config: &PipelineConfig,
) -> Result<(), PipelineError> {
    let brief = render_environment_brief(&config.env);
    let task = match &config.task_text {
        Some(text) => TaskText::custom(format!("{:?}", config.env.scenario), text.clone()),
        None => TaskText::standard(config.env.scenario, config.env.objective),
    };
    let dialogue = build_analysis_dialogue(&brief, &task, config.k, config.generation_mode);
    write(&run_dir.join(AIR_DIR).join("dialogue.txt"), &dialogue.render_text())?;
    let start = gateway.next_ordinal();
    let outcome = generate_initial(&dialogue, gateway);
    let entries = gateway.entries_since(start);
    write_json(&run_dir.join(AIR_TRANSCRIPT_FILE), &entries)?;
    let outcome = outcome?;
    write_json(&run_dir.join(BUFFER_FILE), &outcome.buffer)?;

    let mut pool = Vec::new();
    for (index, (cand, slot)) in outcome.candidates.iter().zip(&outcome.slots).enumerate() {
        let dir = cand_dir(1, index);
        let gen_label = "air/generation".to_string();
        let per_program = format!("air/generation/{slot}");
        let repair = format!("air/repair/{slot}");
        let mine: Vec<&TranscriptEntry> = entries
            .iter()
            .filter(|e| e.label == gen_label || e.label == per_program || e.label == repair)
            .collect();
        write_candidate(run_dir, &dir, &cand.source, &mine, "initial candidate\n")?;
        pool.push(PoolEntry {
            origin: Origin::Initial,
            program_hash: program_hash(&cand.program),
            dir,
            repaired: cand.repaired,
            reused_curve: None,
        });
    }
    manifest.counters.analysis_calls += count_kind(&entries, CallKind::Analysis);
    manifest.counters.generation_calls += count_kind(&entries, CallKind::Generation);
    manifest.counters.repair_calls += count_kind(&entries, CallKind::Repair);
    manifest.air = Some(AirRecord {
        task: task.text,
        analysis_calls: count_kind(&entries, CallKind::Analysis),
        generation_calls: outcome.generation_calls as usize,
        repair_calls: count_kind(&entries, CallKind::Repair),
        admitted: outcome.candidates.len(),
        rejections: outcome.rejections,
        transcript_path: AIR_TRANSCRIPT_FILE.into(),
        buffer_path: BUFFER_FILE.into(),
    });
    if pool.is_empty() {
        manifest.status = RunStatus::Aborted {
            iteration: 0,
            reason: "no initial candidate passed validation".into(),
        };
        checkpoint(manifest, run_dir, gateway)?;
        return Err(PipelineError::Abort {
            iteration: 0,
            reason: "no initial candidate passed validation".into(),
        });
    }
    manifest.pending_pool = pool;
    Ok(())
}

fn write_candidate(
    run_dir: &Path,
    dir: &str,
    source: &str,
    transcript: &[&TranscriptEntry],
    diff: &str,
) -> Result<(), PipelineError> {
    let base = run_dir.join(dir);
    write(&base.join("reward.rdsl"), &format!("{}\n", source.trim_end()))?;
    write_json(&base.join("transcript.json"), &transcript)?;
    write(&base.join("diff.txt"), diff)
}

#[allow(clippy::too_many_arguments)]
fn run_iteration(
    manifest: &mut RunManifest,
    run_dir: &Path,
    gateway: &Gateway,
    config: &PipelineConfig,
    factory: &crate::sim::EnvFactory,
    buffer: &[ChatMessage],
    iteration: usize,
    hooks: RunHooks,
) -> Result<(IterationRecord, Vec<PoolEntry>), PipelineError> {
    let pool = manifest.pending_pool.clone();
    if pool.is_empty() {
        return Err(PipelineError::EmptyPool);
    }
    let mut programs = Vec::with_capacity(pool.len());
    for entry in &pool {
        programs.push(compile(&read(&run_dir.join(&entry.dir).join("reward.rdsl"))?)?);
    }

    let to_train: Vec<(usize, RewardProgram)> = pool
        .iter()
        .enumerate()
        .filter(|(_, e)| e.reused_curve.is_none())
        .map(|(i, _)| (i, programs[i].clone()))
        .collect();
    let trained = if to_train.is_empty() {
        Vec::new()
    } else {
        train_indexed(factory, &to_train, &config.train, config.seed, iteration, config.worker_count)?
    };
    let mut results: Vec<Option<Result<TrainingCurve, TrainError>>> = vec![None; pool.len()];
    for ((i, _), r) in to_train.iter().zip(trained) {
        results[*i] = Some(r);
    }

    let mut candidates = Vec::with_capacity(pool.len());
    let mut curves: Vec<(usize, TrainingCurve)> = Vec::new();
    for (index, entry) in pool.iter().enumerate() {
        let mut record = CandidateRecord {
            index,
            origin: entry.origin,
            program_hash: entry.program_hash.clone(),
            source_path: format!("{}/reward.rdsl", entry.dir),
            transcript_path: format!("{}/transcript.json", entry.dir),
            diff_path: format!("{}/diff.txt", entry.dir),
            seed: candidate_seed(config.seed, iteration, index),
            repaired: entry.repaired,
            curve_path: None,
            stats: None,
            failure: None,
            reused_curve: entry.reused_curve.is_some(),
        };
        let result = match (&entry.reused_curve, results[index].take()) {
            (Some(path), _) => TrainingCurve::from_csv(&read(&run_dir.join(path))?),
            (None, Some(r)) => r,
            (None, None) => unreachable!("every non-reused candidate is trained"),
        };
        match result {
            Ok(curve) => {
                let path = format!("{}/curve.csv", entry.dir);
                write(&run_dir.join(&path), &curve.to_csv())?;
                record.curve_path = Some(path);
                record.stats = Some(
                    curve_stats(&curve.values(), &config.filter).map_err(|e| PipelineError::Config(e.to_string()))?,
                );
                curves.push((index, curve));
            }
            Err(e) => record.failure = Some(e.to_string()),
        }
        candidates.push(record);
    }
    let trainings = to_train.len();
    if hooks.interrupt_after_training == Some(iteration) {
        return Err(PipelineError::Interrupted(format!("training iteration {iteration}")));
    }

    if curves.is_empty() {
        manifest.iterations.push(IterationRecord {
            iteration,
            candidates,
            trainings,
            selection: None,
            evolution: Vec::new(),
        });
        manifest.counters.trainings += trainings;
        return Err(PipelineError::Abort {
            iteration,
            reason: "every candidate failed training".into(),
        });
    }

    let values: Vec<Vec<f64>> = curves.iter().map(|(_, c)| c.values()).collect();
    let selection = filter_and_select(&values, &config.filter).map_err(|e| PipelineError::Config(e.to_string()))?;
    let (best_index, best_curve) = &curves[selection.best_index];
    let best_index = *best_index;
    let best_program = &programs[best_index];
    let best_stats = candidates[best_index].stats.clone().expect("trained candidate has stats");
    let selection_record = SelectionRecord {
        best_index,
        fallback: selection.fallback,
        program_hash: candidates[best_index].program_hash.clone(),
        max_j: best_stats.max_value,
    };

    let mut evolution = Vec::new();
    let mut next_pool = Vec::new();
    if iteration < config.n_iter {
        let feedback = build_feedback(best_curve, &best_stats);
        let start = gateway.next_ordinal();
        let outcomes = evolve(buffer, best_program, &feedback, &config.strategies, config.m, gateway);
        let entries = gateway.entries_since(start);
        manifest.counters.generation_calls += count_kind(&entries, CallKind::Generation);
        manifest.counters.repair_calls += count_kind(&entries, CallKind::Repair);
        let outcomes = outcomes?;

        let best_dir = &pool[best_index].dir;
        let carried = cand_dir(iteration + 1, 0);
        let best_transcript: Vec<TranscriptEntry> =
            serde_json::from_str(&read(&run_dir.join(best_dir).join("transcript.json"))?)
                .map_err(|e| PipelineError::Config(format!("{best_dir}/transcript.json: {e}")))?;
        write_candidate(
            run_dir,
            &carried,
            &read(&run_dir.join(best_dir).join("reward.rdsl"))?,
            &best_transcript.iter().collect::<Vec<_>>(),
            &format!("carried over from iteration {iteration} candidate {best_index}\n"),
        )?;
        next_pool.push(PoolEntry {
            origin: Origin::Best,
            program_hash: selection_record.program_hash.clone(),
            dir: carried,
            repaired: pool[best_index].repaired,
            reused_curve: config
                .reuse_best_curve
                .then(|| candidates[best_index].curve_path.clone().expect("best has a curve")),
        });

        for outcome in outcomes {
            let code = outcome.strategy.code();
            for cand in &outcome.candidates {
                let dir = cand_dir(iteration + 1, next_pool.len());
                let repair = format!("evolve/{code}/repair/{}", cand.slot);
                let mine: Vec<&TranscriptEntry> = entries
                    .iter()
                    .filter(|e| e.ordinal == outcome.ordinal || e.label == repair)
                    .collect();
                write_candidate(run_dir, &dir, &cand.source, &mine, &cand.diff.render())?;
                next_pool.push(PoolEntry {
                    origin: Origin::Strategy(outcome.strategy),
                    program_hash: program_hash(&cand.program),
                    dir,
                    repaired: cand.repaired,
                    reused_curve: None,
                });
            }
            evolution.push(EvolutionRecord {
                strategy: outcome.strategy,
                ordinal: outcome.ordinal,
                admitted: outcome.candidates.len(),
                diffs: outcome.candidates.iter().map(|c| c.diff.clone()).collect(),
                rejections: outcome.rejections,
            });
        }
    }

    Ok((
        IterationRecord {
            iteration,
            candidates,
            trainings,
            selection: Some(selection_record),
            evolution,
        },
        next_pool,
    ))
}

/// Re-runs the filter on one iteration's persisted curves. Returns the
/// selected candidate index and fallback flag.
pub fn replay_selection(
    run_dir: &Path,
    record: &IterationRecord,
    filter: &FilterConfig,
) -> Result<Option<(usize, bool)>, PipelineError> {
    let mut indices = Vec::new();
    let mut curves = Vec::new();
    for c in &record.candidates {
        if let Some(path) = &c.curve_path {
            let curve = TrainingCurve::from_csv(&read(&run_dir.join(path))?)
                .map_err(|e| PipelineError::Config(format!("{path}: {e}")))?;
            indices.push(c.index);
            curves.push(curve.values());
        }
    }
    if curves.is_empty() {
        return Ok(None);
    }
    let Selection {
        best_index, fallback, ..
    } = filter_and_select(&curves, filter).map_err(|e| PipelineError::Config(e.to_string()))?;
    Ok(Some((indices[best_index], fallback)))
}
