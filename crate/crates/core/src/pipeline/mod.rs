//! The outer reward-design loop: initial generation, parallel training,
//! curve filtering and evolution, with every artifact persisted under a run
//! directory so that an interrupted run can be resumed.

mod config;
pub mod export;
mod manifest;
mod pool;
mod run;

pub use config::{EnvSource, PipelineConfig};
pub use manifest::{
    AirRecord, CandidateRecord, Counters, EvolutionRecord, FinalBest, IterationRecord, Origin, PoolEntry, RunManifest,
    RunStatus, SelectionRecord, Timings, MANIFEST_FILE, MANIFEST_FORMAT,
};
pub use export::export_run;
pub use pool::{candidate_seed, train_pool};
pub use run::{program_hash, replay_selection, resume_pipeline, run_pipeline, RunHooks};

use std::path::Path;

use thiserror::Error;

use crate::air::AirError;
use crate::dsl::DslError;
use crate::llm::LlmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Gateway(#[from] LlmError),
    #[error("{0}")]
    Extraction(String),
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("empty candidate pool")]
    EmptyPool,
    #[error("iteration {iteration}: {reason}")]
    Abort { iteration: usize, reason: String },
    #[error("interrupted after {0}")]
    Interrupted(String),
}

impl From<AirError> for PipelineError {
    fn from(e: AirError) -> Self {
        match e {
            AirError::Gateway(g) => Self::Gateway(g),
            other @ AirError::Extraction { .. } => Self::Extraction(other.to_string()),
        }
    }
}

impl PipelineError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Process exit code: 1 transport or config, 2 DSL validation, 3 abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::Gateway(_) | Self::Interrupted(_) => 1,
            Self::Dsl(_) => 2,
            Self::Extraction(_) | Self::EmptyPool | Self::Abort { .. } => 3,
        }
    }

    /// Single line, `PREFIX: message`.
    pub fn error_line(&self) -> String {
        let prefix = match self {
            Self::Config(_) => "CONFIG",
            Self::Io { .. } => "IO",
            Self::Gateway(LlmError::Auth(_)) => "AUTH",
            Self::Gateway(LlmError::Config(_)) => "CONFIG",
            Self::Gateway(LlmError::MockExhausted { .. } | LlmError::Expectation { .. }) => "MOCK",
            Self::Gateway(_) => "TRANSPORT",
            Self::Dsl(e) => return e.to_string().replace('\n', " "),
            Self::Extraction(_) => "EXTRACTION",
            Self::EmptyPool | Self::Abort { .. } => "ABORT",
            Self::Interrupted(_) => "INTERRUPTED",
        };
        format!("{prefix}: {}", self.to_string().replace('\n', " "))
    }
}

#[cfg(test)]
mod tests;
