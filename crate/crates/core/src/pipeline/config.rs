use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::air::GenerationMode;
use crate::evoleap::EvolutionStrategy;
use crate::filter::FilterConfig;
use crate::llm::ProviderConfig;
use crate::network::{bundled_network, generate_missions, load_graph, MissionSpec, NetworkFile};
use crate::sim::scenarios::{line_graph, task_on};
use crate::sim::{EnvConfig, EnvFactory};
use crate::trainer::TrainConfig;

/// Where training missions come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSource {
    /// Two trucks on a three-hub line with 50 km edges, the second starting two steps later.
    Line,
    /// Missions sampled on a network file, or the bundled network when `path` is absent.
    Network {
        #[serde(default)]
        path: Option<PathBuf>,
        /// Zone ids to sample in; empty means all zones.
        #[serde(default)]
        zones: Vec<u32>,
        #[serde(default = "default_missions_per_zone")]
        missions_per_zone: usize,
        #[serde(default = "default_window")]
        window: (u32, u32),
    },
}

fn default_missions_per_zone() -> usize {
    MissionSpec::default().missions_per_zone
}

fn default_window() -> (u32, u32) {
    MissionSpec::default().window
}

impl Default for EnvSource {
    fn default() -> Self {
        Self::Network {
            path: None,
            zones: vec![0],
            missions_per_zone: default_missions_per_zone(),
            window: default_window(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub n_iter: usize,
    pub k: usize,
    pub m: usize,
    pub strategies: Vec<EvolutionStrategy>,
    pub generation_mode: GenerationMode,
    pub worker_count: usize,
    pub seed: u64,
    /// Reuse the carried-over best's curve instead of retraining it.
    pub reuse_best_curve: bool,
    /// Task text override; the built-in text for the scenario is used otherwise.
    pub task_text: Option<String>,
    pub source: EnvSource,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub filter: FilterConfig,
    pub provider: ProviderConfig,
    /// Output root; runs go to `<run_root>/<run id>`. Not part of the config hash.
    pub run_root: PathBuf,
    /// Explicit run id. Not part of the config hash.
    pub run_id: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            n_iter: 5,
            k: 4,
            m: 1,
            strategies: EvolutionStrategy::DEFAULT_SET.to_vec(),
            generation_mode: GenerationMode::Batch,
            worker_count: 4,
            seed: 0,
            reuse_best_curve: false,
            task_text: None,
            source: EnvSource::default(),
            env: EnvConfig::default(),
            train: TrainConfig::default(),
            filter: FilterConfig::default(),
            provider: ProviderConfig::default(),
            run_root: PathBuf::from("runs"),
            run_id: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.n_iter == 0 || self.k == 0 || self.m == 0 {
            return bad("n_iter, k and m must be at least 1");
        }
        if self.worker_count == 0 {
            return bad("worker_count must be at least 1");
        }
        if self.n_iter > 1 && self.strategies.is_empty() {
            return bad("at least one evolution strategy is needed when n_iter > 1");
        }
        self.env.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.train.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.filter.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.provider.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.train.curve_length() != self.filter.length {
            return bad("training curve length must equal the filter's curve length");
        }
        Ok(())
    }

    /// Hex SHA-256 of the config without its output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run_root = PathBuf::new();
        c.run_id = None;
        let json = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn default_run_id(&self) -> String {
        format!("seed{}-{}", self.seed, &self.hash()[..8])
    }

    pub fn run_id(&self) -> String {
        self.run_id.clone().unwrap_or_else(|| self.default_run_id())
    }

    /// Builds the training environment; missions are seeded from the master seed.
    pub fn env_factory(&self) -> Result<EnvFactory, PipelineError> {
        match &self.source {
            EnvSource::Line => {
                let graph = line_graph(3, 50.0);
                let missions = vec![
                    task_on(&graph, 0, &[0, 1, 2], 1, &self.env),
                    task_on(&graph, 1, &[0, 1, 2], 3, &self.env),
                ];
                Ok(EnvFactory::new(graph, missions, self.env))
            }
            EnvSource::Network {
                path,
                zones,
                missions_per_zone,
                window,
            } => {
                let NetworkFile { graph, zones: all } = match path {
                    Some(p) => load_graph(p).map_err(|e| PipelineError::Config(e.to_string()))?,
                    None => bundled_network(),
                };
                let chosen: Vec<_> = if zones.is_empty() {
                    all
                } else {
                    let picked: Vec<_> = all.into_iter().filter(|z| zones.contains(&z.id)).collect();
                    if picked.len() != zones.len() {
                        return Err(PipelineError::Config(format!("unknown zone in {zones:?}")));
                    }
                    picked
                };
                let spec = MissionSpec {
                    missions_per_zone: *missions_per_zone,
                    window: *window,
                    seed: self.seed,
                };
                let missions = generate_missions(&graph, &chosen, &spec, &self.env)
                    .map_err(|e| PipelineError::Config(e.to_string()))?;
                Ok(EnvFactory::new(graph, missions, self.env))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!((c.n_iter, c.k, c.m), (5, 4, 1));
        assert_eq!(c.strategies.len(), 4);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn toml_round_trip_and_partial_files() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&c.to_toml()).unwrap(), c);
        let partial = PipelineConfig::from_toml("k = 2\nseed = 7\n[source]\nkind = \"line\"\n[train]\nmax_training_episodes = 400\n").unwrap();
        assert_eq!(partial.k, 2);
        assert_eq!(partial.source, EnvSource::Line);
        assert_eq!(partial.train.max_training_episodes, 400);
        assert_eq!(partial.train.batch_size, 24);
        assert!(PipelineConfig::from_toml("k = \"x\"").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            run_root: "elsewhere".into(),
            run_id: Some("x".into()),
            ..a.clone()
        };
        assert_eq!(a.hash(), b.hash());
        let c = PipelineConfig { seed: 1, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
        assert!(a.default_run_id().starts_with("seed0-"));
    }

    #[test]
    fn mismatched_curve_length_is_rejected() {
        let mut c = PipelineConfig::default();
        c.train.max_training_episodes = 400;
        assert!(c.validate().is_err());
    }

    #[test]
    fn builds_default_environment() {
        let f = PipelineConfig::default().env_factory().unwrap();
        assert_eq!(f.truck_count(), 5);
    }
}
