use serde::{Deserialize, Serialize};

use super::TrainError;

/// Training hyperparameters. Defaults follow the reference schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_training_episodes: u32,
    pub batch_size: usize,
    /// Capacity in episodes.
    pub replay_capacity: usize,
    pub gamma: f64,
    pub learning_rate: f64,
    pub epsilon_init: f64,
    pub epsilon_min: f64,
    /// Joint environment steps over which epsilon decays linearly.
    pub epsilon_decay_env_steps: u64,
    pub eval_every_episodes: u32,
    pub eval_rollouts_per_point: u32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_training_episodes: 4000,
            batch_size: 24,
            replay_capacity: 100,
            gamma: 0.99,
            learning_rate: 1e-3,
            epsilon_init: 1.0,
            epsilon_min: 0.05,
            epsilon_decay_env_steps: 50_000,
            eval_every_episodes: 40,
            eval_rollouts_per_point: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn curve_length(&self) -> usize {
        (self.max_training_episodes / self.eval_every_episodes.max(1)) as usize
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if self.eval_every_episodes == 0 || !self.max_training_episodes.is_multiple_of(self.eval_every_episodes) {
            return bad("max_training_episodes must be a positive multiple of eval_every_episodes");
        }
        if self.max_training_episodes == 0 {
            return bad("max_training_episodes must be positive");
        }
        if self.batch_size == 0 || self.replay_capacity == 0 || self.eval_rollouts_per_point == 0 {
            return bad("batch_size, replay_capacity and eval_rollouts_per_point must be positive");
        }
        if !unit(self.gamma) || !unit(self.learning_rate) || !unit(self.epsilon_init) {
            return bad("gamma, learning_rate and epsilon_init must lie in (0, 1]");
        }
        if !(0.0..=self.epsilon_init).contains(&self.epsilon_min) {
            return bad("epsilon_min must lie in [0, epsilon_init]");
        }
        if self.epsilon_decay_env_steps == 0 {
            return bad("epsilon_decay_env_steps must be positive");
        }
        Ok(())
    }

    /// Linear decay from `epsilon_init` to `epsilon_min`, then constant.
    pub fn epsilon_at(&self, env_steps: u64) -> f64 {
        let frac = (env_steps as f64 / self.epsilon_decay_env_steps as f64).min(1.0);
        self.epsilon_init - (self.epsilon_init - self.epsilon_min) * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_schedule() {
        let c = TrainConfig::default();
        assert_eq!(c.epsilon_at(0), 1.0);
        assert!((c.epsilon_at(25_000) - 0.525).abs() < 1e-9);
        assert!((c.epsilon_at(50_000) - 0.05).abs() < 1e-12);
        assert!((c.epsilon_at(90_000) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn default_curve_length() {
        assert_eq!(TrainConfig::default().curve_length(), 100);
        assert!(TrainConfig::default().validate().is_ok());
    }

    #[test]
    fn rejects_ragged_eval_interval() {
        let c = TrainConfig {
            max_training_episodes: 90,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
