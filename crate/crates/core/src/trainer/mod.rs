//! Parameter-shared Q-learning over all trucks, producing a fixed-length
//! fitness curve per reward program.

mod config;
mod curve;
mod policy;
mod qfunction;
mod replay;
mod train;

pub use config::TrainConfig;
pub use curve::{CurvePoint, TrainingCurve, CURVE_CSV_HEADER};
pub use policy::{evaluate_policy, greedy_action, random_baseline, rollout, FixedPolicy, GreedyPolicy, Policy, RandomPolicy, RolloutResult};
pub use qfunction::{observation_key, td_target, QFunction, TabularQ, Transition, QTABLE_HEADER};
pub use replay::{Episode, ReplayBuffer};
pub use train::{train, train_with, TrainOutcome};

use thiserror::Error;

use crate::dsl::DslError;
use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    /// The reward program failed at runtime; the candidate is invalid.
    #[error("candidate failed (truck {truck_id}, step {step}): {error}")]
    CandidateFailure {
        episode: Option<u32>,
        truck_id: u32,
        step: u32,
        error: DslError,
    },
}
