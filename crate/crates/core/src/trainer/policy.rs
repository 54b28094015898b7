use rand::seq::IteratorRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsl::RewardProgram;
use crate::sim::{ActionMask, ActionSpec, EnvFactory, ObjectiveTotals, Observation, PlatoonEnv, TrajectoryRecord};

use super::{QFunction, TrainError};

/// Chooses one legal action for a truck. `mask` is never empty.
pub trait Policy {
    fn act(&mut self, obs: &Observation, mask: ActionMask, rng: &mut dyn RngCore) -> ActionSpec;
}

/// Uniform over legal actions.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn act(&mut self, _obs: &Observation, mask: ActionMask, rng: &mut dyn RngCore) -> ActionSpec {
        mask.iter().choose(rng).expect("non-empty mask")
    }
}

/// Always the preferred action when legal, otherwise SpeedMed, otherwise the first legal one.
#[derive(Debug, Clone, Copy)]
pub struct FixedPolicy(pub ActionSpec);

impl Policy for FixedPolicy {
    fn act(&mut self, _obs: &Observation, mask: ActionMask, _rng: &mut dyn RngCore) -> ActionSpec {
        [self.0, ActionSpec::SpeedMed]
            .into_iter()
            .find(|a| mask.contains(*a))
            .or_else(|| mask.iter().next())
            .expect("non-empty mask")
    }
}

/// Highest-valued legal action; ties broken uniformly at random.
pub fn greedy_action(values: &[f64; ActionSpec::COUNT], mask: ActionMask, rng: &mut dyn RngCore) -> ActionSpec {
    let best = mask.iter().map(|a| values[a.index()]).fold(f64::NEG_INFINITY, f64::max);
    mask.iter()
        .filter(|a| values[a.index()] == best)
        .choose(rng)
        .expect("non-empty mask")
}

/// Greedy with respect to a Q-function.
pub struct GreedyPolicy<'a, Q: QFunction>(pub &'a Q);

impl<Q: QFunction> Policy for GreedyPolicy<'_, Q> {
    fn act(&mut self, obs: &Observation, mask: ActionMask, rng: &mut dyn RngCore) -> ActionSpec {
        greedy_action(&self.0.predict(obs), mask, rng)
    }
}

/// Epsilon-greedy behaviour policy used while training.
pub(crate) fn epsilon_greedy(
    q: &impl QFunction,
    obs: &Observation,
    mask: ActionMask,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> ActionSpec {
    if rng.random::<f64>() < epsilon {
        RandomPolicy.act(obs, mask, rng)
    } else {
        greedy_action(&q.predict(obs), mask, rng)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutResult {
    pub objective: f64,
    pub totals: ObjectiveTotals,
    pub steps: u32,
    pub reward_sum: f64,
    /// Number of (truck, step) rewards summed.
    pub reward_count: u64,
    pub trajectory: Vec<TrajectoryRecord>,
}

/// Plays one full episode from a fresh reset.
pub fn rollout(
    env: &mut PlatoonEnv,
    policy: &mut dyn Policy,
    program: &RewardProgram,
    rng: &mut dyn RngCore,
    record: bool,
) -> Result<RolloutResult, TrainError> {
    if record {
        env.enable_log();
    }
    let mut obs = env.reset()?;
    let (mut reward_sum, mut reward_count, mut steps) = (0.0, 0u64, 0u32);
    while !env.is_done() {
        let actions: Vec<Option<ActionSpec>> = (0..env.truck_count())
            .map(|slot| env.needs_action(slot).then(|| policy.act(&obs[slot], env.mask(slot), rng)))
            .collect();
        let out = env.step(&actions, program)?;
        for (r, acted) in out.rewards.iter().zip(&out.acted) {
            if *acted {
                reward_sum += r;
                reward_count += 1;
            }
        }
        obs = out.observations;
        steps += 1;
    }
    Ok(RolloutResult {
        objective: env.objective()?,
        totals: env.totals(),
        steps,
        reward_sum,
        reward_count,
        trajectory: env.log().to_vec(),
    })
}

/// Mean objective of greedy rollouts. Panics when `rollouts` is zero.
pub fn evaluate_policy(
    factory: &EnvFactory,
    q: &impl QFunction,
    program: &RewardProgram,
    rollouts: u32,
    seed: u64,
) -> Result<f64, TrainError> {
    assert!(rollouts > 0, "evaluate_policy needs at least one rollout");
    let mut env = factory.make()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy = GreedyPolicy(q);
    let mut total = 0.0;
    for _ in 0..rollouts {
        total += rollout(&mut env, &mut policy, program, &mut rng, false)?.objective;
    }
    Ok(total / f64::from(rollouts))
}

/// Mean objective of the uniform random policy.
pub fn random_baseline(factory: &EnvFactory, program: &RewardProgram, rollouts: u32, seed: u64) -> Result<f64, TrainError> {
    assert!(rollouts > 0, "random_baseline needs at least one rollout");
    let mut env = factory.make()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..rollouts {
        total += rollout(&mut env, &mut RandomPolicy, program, &mut rng, false)?.objective;
    }
    Ok(total / f64::from(rollouts))
}
