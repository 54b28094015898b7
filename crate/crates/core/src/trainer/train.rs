use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::RewardProgram;
use crate::sim::{ActionSpec, EnvFactory, SimError};

use super::policy::{epsilon_greedy, evaluate_policy};
use super::{
    td_target, CurvePoint, Episode, QFunction, ReplayBuffer, TabularQ, TrainConfig, TrainError, TrainingCurve,
    Transition,
};

/// Result of one training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome<Q> {
    pub q: Q,
    pub curve: TrainingCurve,
    pub env_steps: u64,
}

const EVAL_SEED_SALT: u64 = 0x5eed_e7a1;

/// Trains the tabular reference learner.
pub fn train(factory: &EnvFactory, program: &RewardProgram, config: &TrainConfig) -> Result<TrainOutcome<TabularQ>, TrainError> {
    train_with(factory, program, config, TabularQ::new())
}

/// Parameter-shared epsilon-greedy Q-learning with episodic replay.
pub fn train_with<Q: QFunction>(
    factory: &EnvFactory,
    program: &RewardProgram,
    config: &TrainConfig,
    mut q: Q,
) -> Result<TrainOutcome<Q>, TrainError> {
    config.validate()?;
    let mut env = factory.make()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut replay = ReplayBuffer::new(config.replay_capacity);
    let mut curve = TrainingCurve::default();
    let mut env_steps = 0u64;
    let (mut window_reward, mut window_count) = (0.0, 0u64);

    for episode in 0..config.max_training_episodes {
        let fail = |e: SimError| match e {
            SimError::RewardRuntime { truck_id, step, error } => TrainError::CandidateFailure {
                episode: Some(episode),
                truck_id,
                step,
                error,
            },
            other => TrainError::Sim(other),
        };
        let mut obs = env.reset().map_err(fail)?;
        let mut transitions = Vec::new();
        while !env.is_done() {
            let epsilon = config.epsilon_at(env_steps);
            let actions: Vec<Option<ActionSpec>> = (0..env.truck_count())
                .map(|slot| {
                    env.needs_action(slot)
                        .then(|| epsilon_greedy(&q, &obs[slot], env.mask(slot), epsilon, &mut rng))
                })
                .collect();
            let out = env.step(&actions, program).map_err(fail)?;
            env_steps += 1;
            for (slot, action) in actions.iter().enumerate() {
                let Some(action) = *action else { continue };
                let next_mask = env.mask(slot);
                transitions.push(Transition {
                    obs: obs[slot],
                    action,
                    reward: out.rewards[slot],
                    next_obs: out.observations[slot],
                    next_mask,
                    terminal: next_mask.is_empty(),
                });
                window_reward += out.rewards[slot];
                window_count += 1;
            }
            obs = out.observations;
        }
        replay.push(Episode {
            id: u64::from(episode),
            transitions,
        });

        for sampled in replay.sample(config.batch_size, &mut rng) {
            let targets: Vec<f64> = sampled
                .transitions
                .iter()
                .map(|t| td_target(&q, t, config.gamma))
                .collect();
            q.update(&sampled.transitions, &targets, config.learning_rate);
        }

        if (episode + 1) % config.eval_every_episodes == 0 {
            let index = curve.len();
            let seed = config.seed ^ EVAL_SEED_SALT ^ (index as u64) << 20;
            let j = evaluate_policy(factory, &q, program, config.eval_rollouts_per_point, seed).map_err(
                |e| match e {
                    TrainError::Sim(s) => fail(s),
                    other => other,
                },
            )?;
            let mean_step_reward = if window_count == 0 {
                0.0
            } else {
                window_reward / window_count as f64
            };
            curve.points.push(CurvePoint {
                eval_index: index,
                j,
                mean_step_reward,
            });
            (window_reward, window_count) = (0.0, 0);
        }
    }
    Ok(TrainOutcome { q, curve, env_steps })
}
