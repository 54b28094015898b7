//! Plays the two-truck line scenario with a few hand-written policies.
//!
//! `cargo run --example rollout_line`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pcrd::dsl::compile;
use pcrd::sim::scenarios::line_scenario;
use pcrd::sim::{ActionMask, ActionSpec, LocationCode, Objective, Observation};
use pcrd::trainer::{random_baseline, rollout, FixedPolicy, Policy};

/// Waits at a hub while the delay budget allows and nobody shares the next edge.
struct WaitForCompany;

impl Policy for WaitForCompany {
    fn act(&mut self, obs: &Observation, mask: ActionMask, _: &mut dyn rand::RngCore) -> ActionSpec {
        let alone = obs.location == LocationCode::AtHub && obs.shared_next_edge_count == 0;
        if alone && mask.contains(ActionSpec::Wait) {
            ActionSpec::Wait
        } else {
            ActionSpec::SpeedMed
        }
    }
}

fn main() {
    let factory = line_scenario(Objective::SingleObject);
    let program = compile("term platoon_km weight 1: step_platoon_km").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut env = factory.make().unwrap();

    let r = rollout(&mut env, &mut WaitForCompany, &program, &mut rng, true).unwrap();
    println!("wait-for-company: J = {}  D_p = {}  T_d = {}", r.objective, r.totals.d_p, r.totals.t_d);
    for rec in &r.trajectory {
        println!("  {rec}");
    }
    let r = rollout(&mut env, &mut FixedPolicy(ActionSpec::SpeedMed), &program, &mut rng, false).unwrap();
    println!("always medium:    J = {}  D_p = {}", r.objective, r.totals.d_p);
    let mean = random_baseline(&factory, &program, 200, 1).unwrap();
    println!("random (200 episodes): mean J = {mean:.2}");
}
