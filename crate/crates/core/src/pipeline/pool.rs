use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::dsl::RewardProgram;
use crate::sim::EnvFactory;
use crate::trainer::{train, TrainConfig, TrainError, TrainingCurve};

/// Training seed for one candidate, independent of worker placement.
pub fn candidate_seed(master: u64, iteration: usize, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(b"pcrd-candidate");
    h.update(master.to_le_bytes());
    h.update((iteration as u64).to_le_bytes());
    h.update((index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Trains every program on `workers` threads. Results keep pool order; a
/// failing candidate yields an `Err` entry and the rest proceed.
pub fn train_pool(
    factory: &EnvFactory,
    pool: &[RewardProgram],
    config: &TrainConfig,
    master_seed: u64,
    iteration: usize,
    workers: usize,
) -> Result<Vec<Result<TrainingCurve, TrainError>>, PipelineError> {
    let items: Vec<(usize, RewardProgram)> = pool.iter().cloned().enumerate().collect();
    train_indexed(factory, &items, config, master_seed, iteration, workers)
}

/// Like [`train_pool`] for a subset; each program keeps its pool index for seeding.
pub(crate) fn train_indexed(
    factory: &EnvFactory,
    items: &[(usize, RewardProgram)],
    config: &TrainConfig,
    master_seed: u64,
    iteration: usize,
    workers: usize,
) -> Result<Vec<Result<TrainingCurve, TrainError>>, PipelineError> {
    if items.is_empty() {
        return Err(PipelineError::EmptyPool);
    }
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))?;
    Ok(threads.install(|| {
        items
            .par_iter()
            .map(|(index, program)| {
                let cfg = TrainConfig {
                    seed: candidate_seed(master_seed, iteration, *index),
                    ..config.clone()
                };
                train(factory, program, &cfg).map(|o| o.curve)
            })
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile;
    use crate::sim::scenarios::line_scenario;
    use crate::sim::Objective;

    fn small() -> TrainConfig {
        TrainConfig {
            max_training_episodes: 40,
            eval_every_episodes: 4,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn seeds_differ_by_position() {
        let a = candidate_seed(7, 1, 0);
        assert_eq!(a, candidate_seed(7, 1, 0));
        assert_ne!(a, candidate_seed(7, 1, 1));
        assert_ne!(a, candidate_seed(7, 2, 0));
        assert_ne!(a, candidate_seed(8, 1, 0));
    }

    #[test]
    fn placement_independent() {
        let f = line_scenario(Objective::SingleObject);
        let pool: Vec<_> = (0..5)
            .map(|i| compile(&format!("term p weight {}: step_platoon_km", i + 1)).unwrap())
            .collect();
        let two = train_pool(&f, &pool, &small(), 3, 1, 2).unwrap();
        let five = train_pool(&f, &pool, &small(), 3, 1, 5).unwrap();
        assert_eq!(two.len(), 5);
        assert_eq!(two, five);
    }

    #[test]
    fn failure_is_isolated() {
        let f = line_scenario(Objective::SingleObject);
        let mut pool: Vec<_> = (0..4).map(|_| compile("term p weight 1: in_platoon").unwrap()).collect();
        pool.insert(2, compile("term bad weight 1: 1 / (step_index - 2)").unwrap());
        let out = train_pool(&f, &pool, &small(), 0, 1, 3).unwrap();
        assert_eq!(out.iter().filter(|r| r.is_ok()).count(), 4);
        assert!(matches!(out[2], Err(TrainError::CandidateFailure { .. })));
    }

    #[test]
    fn empty_pool_is_an_error() {
        let f = line_scenario(Objective::SingleObject);
        assert_eq!(train_pool(&f, &[], &small(), 0, 1, 1).unwrap_err(), PipelineError::EmptyPool);
    }
}
