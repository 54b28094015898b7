//! Flat CSV views of a finished or partial run.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{PipelineError, RunManifest};
use crate::trainer::TrainingCurve;

#[derive(Debug, Serialize)]
struct CurveRow<'a> {
    iteration: usize,
    candidate: usize,
    origin: String,
    program_hash: &'a str,
    eval_index: usize,
    j: f64,
    mean_step_reward: f64,
}

#[derive(Debug, Serialize)]
struct CandidateRow<'a> {
    iteration: usize,
    candidate: usize,
    origin: String,
    program_hash: &'a str,
    seed: u64,
    repaired: bool,
    reused_curve: bool,
    early_mean: Option<f64>,
    late_mean: Option<f64>,
    early_std: Option<f64>,
    late_std: Option<f64>,
    slope_sign: Option<i8>,
    max_j: Option<f64>,
    pass_mean: Option<bool>,
    pass_std: Option<bool>,
    pass_slope: Option<bool>,
    selected: bool,
    fallback: bool,
    failure: Option<&'a str>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| PipelineError::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| PipelineError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per evaluation point of every trained candidate.
pub fn curves_csv(run_dir: &Path, manifest: &RunManifest) -> Result<String, PipelineError> {
    let mut rows = Vec::new();
    for it in &manifest.iterations {
        for c in &it.candidates {
            let Some(path) = &c.curve_path else { continue };
            let full = run_dir.join(path);
            let text = std::fs::read_to_string(&full).map_err(|e| PipelineError::io(&full, e))?;
            let curve = TrainingCurve::from_csv(&text).map_err(|e| PipelineError::Config(format!("{path}: {e}")))?;
            rows.extend(curve.points.iter().map(|p| CurveRow {
                iteration: it.iteration,
                candidate: c.index,
                origin: c.origin.to_string(),
                program_hash: &c.program_hash,
                eval_index: p.eval_index,
                j: p.j,
                mean_step_reward: p.mean_step_reward,
            }));
        }
    }
    to_csv(&rows)
}

/// One row per candidate with its filter statistics and selection flags.
pub fn candidates_csv(manifest: &RunManifest) -> Result<String, PipelineError> {
    let mut rows = Vec::new();
    for it in &manifest.iterations {
        for c in &it.candidates {
            let s = c.stats.as_ref();
            let selected = it.selection.as_ref().is_some_and(|sel| sel.best_index == c.index);
            rows.push(CandidateRow {
                iteration: it.iteration,
                candidate: c.index,
                origin: c.origin.to_string(),
                program_hash: &c.program_hash,
                seed: c.seed,
                repaired: c.repaired,
                reused_curve: c.reused_curve,
                early_mean: s.map(|s| s.early_mean),
                late_mean: s.map(|s| s.late_mean),
                early_std: s.map(|s| s.early_std),
                late_std: s.map(|s| s.late_std),
                slope_sign: s.map(|s| s.slope_sign),
                max_j: s.map(|s| s.max_value),
                pass_mean: s.map(|s| s.pass_mean),
                pass_std: s.map(|s| s.pass_std),
                pass_slope: s.map(|s| s.pass_slope),
                selected,
                fallback: selected && it.selection.as_ref().is_some_and(|sel| sel.fallback),
                failure: c.failure.as_deref(),
            });
        }
    }
    to_csv(&rows)
}

/// Writes `curves.csv` and `candidates.csv` into `out_dir` and returns their paths.
pub fn export_run(run_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let manifest = RunManifest::load(run_dir)?;
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;
    let files = [
        ("curves.csv", curves_csv(run_dir, &manifest)?),
        ("candidates.csv", candidates_csv(&manifest)?),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| PipelineError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
