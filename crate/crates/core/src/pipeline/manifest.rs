use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError};
use crate::air::Rejection;
use crate::dsl::EditSummary;
use crate::evoleap::EvolutionStrategy;
use crate::filter::CurveStats;

pub const MANIFEST_FORMAT: &str = "pcrd-manifest v1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Where a pool candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Initial,
    /// The previous iteration's best, carried into the next pool.
    Best,
    Strategy(EvolutionStrategy),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Initial => f.write_str("initial"),
            Origin::Best => f.write_str("best"),
            Origin::Strategy(s) => write!(f, "{s:?}"),
        }
    }
}

/// A candidate waiting to be trained. Its directory already holds
/// `reward.rdsl`, `transcript.json` and `diff.txt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub origin: Origin,
    pub program_hash: String,
    /// Candidate directory relative to the run directory.
    pub dir: String,
    pub repaired: bool,
    /// Curve reused from an earlier iteration instead of retraining.
    #[serde(default)]
    pub reused_curve: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub index: usize,
    pub origin: Origin,
    pub program_hash: String,
    pub source_path: String,
    pub transcript_path: String,
    pub diff_path: String,
    pub seed: u64,
    pub repaired: bool,
    pub curve_path: Option<String>,
    pub stats: Option<CurveStats>,
    pub failure: Option<String>,
    /// True when the curve was reused rather than trained.
    pub reused_curve: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub strategy: EvolutionStrategy,
    pub ordinal: u64,
    pub admitted: usize,
    pub diffs: Vec<EditSummary>,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub candidates: Vec<CandidateRecord>,
    pub trainings: usize,
    /// Absent only when every candidate failed.
    pub selection: Option<SelectionRecord>,
    pub evolution: Vec<EvolutionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    /// Index into the iteration's candidates.
    pub best_index: usize,
    pub fallback: bool,
    pub program_hash: String,
    pub max_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirRecord {
    pub task: String,
    pub analysis_calls: usize,
    pub generation_calls: usize,
    pub repair_calls: usize,
    pub admitted: usize,
    pub rejections: Vec<Rejection>,
    pub transcript_path: String,
    pub buffer_path: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub analysis_calls: usize,
    pub generation_calls: usize,
    pub repair_calls: usize,
    pub trainings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalBest {
    pub iteration: usize,
    pub program_hash: String,
    pub source_path: String,
    pub source: String,
    pub max_j: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Completed,
    Aborted { iteration: usize, reason: String },
}

/// Wall-clock data; excluded from manifest comparisons.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub started_at: String,
    pub updated_at: String,
    pub air_seconds: f64,
    pub iteration_seconds: Vec<f64>,
    pub resumed_at: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub run_id: String,
    /// Snapshot without the output location.
    pub config: PipelineConfig,
    pub config_hash: String,
    pub brief_hash: String,
    pub prompt_version: String,
    pub provider: String,
    pub status: RunStatus,
    pub air: Option<AirRecord>,
    pub iterations: Vec<IterationRecord>,
    /// Pool for the next iteration to train.
    pub pending_pool: Vec<PoolEntry>,
    /// Gateway ordinal to continue from on resume.
    pub next_ordinal: u64,
    pub counters: Counters,
    pub final_best: Option<FinalBest>,
    pub timings: Timings,
}

impl RunManifest {
    pub fn load(run_dir: &Path) -> Result<Self, PipelineError> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
        let m: Self =
            serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        if m.format != MANIFEST_FORMAT {
            return Err(PipelineError::Config(format!("{}: unsupported format '{}'", path.display(), m.format)));
        }
        Ok(m)
    }

    /// Writes atomically via a temporary file.
    pub fn save(&self, run_dir: &Path) -> Result<(), PipelineError> {
        let path = run_dir.join(MANIFEST_FILE);
        let tmp = run_dir.join("manifest.json.tmp");
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(&tmp, text + "\n").map_err(|e| PipelineError::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| PipelineError::io(&path, e))
    }

    /// The manifest with wall-clock fields cleared, for comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    pub fn pool_sizes(&self) -> Vec<usize> {
        self.iterations.iter().map(|i| i.candidates.len()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Completed
    }
}
