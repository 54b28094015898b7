//! Discrete-time truck platoon environment: kinematics, platoon formation,
//! delay-cap masking, observations and the two objectives.

mod action;
mod brief;
mod config;
mod env;
mod features;
mod objective;
mod platoon;
pub mod scenarios;
mod state;

pub use action::{action_mask, ActionMask, ActionSpec};
pub use brief::{brief_hash, render_environment_brief};
pub use config::{derive_deadline, EnvConfig, Objective, Scenario};
pub use env::{EnvFactory, PlatoonEnv, StepInfo, StepOutcome, TrajectoryRecord};
pub use features::{LocationCode, Observation, StepTrace};
pub use objective::{compute_objective, ObjectiveTotals};
pub use platoon::{update_platoons, Platoon, PlatoonLedger};
pub use state::{Location, PlatoonId, TruckState};

use thiserror::Error;

use crate::dsl::DslError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid environment config: {0}")]
    Config(String),
    #[error("invalid mission: {0}")]
    Mission(String),
    #[error("truck {truck_id}: illegal action {action} at step {step}")]
    IllegalAction {
        truck_id: u32,
        action: ActionSpec,
        step: u32,
    },
    #[error("truck {truck_id} needs an action")]
    MissingAction { truck_id: u32 },
    #[error("expected {expected} actions, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("truck {truck_id} step {step}: {error}")]
    RewardRuntime {
        truck_id: u32,
        step: u32,
        error: DslError,
    },
    #[error("objective undefined: {0} is zero")]
    DegenerateDenominator(&'static str),
    #[error("episode is over")]
    EpisodeOver,
}
