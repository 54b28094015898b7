use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{shortest_path, HubId, NetworkError, TransportGraph, Zone};
use crate::sim::{derive_deadline, EnvConfig};

/// `I_i`: origin, destination, departure step, deadline and the fixed route.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreightTask {
    pub truck_id: u32,
    pub origin: HubId,
    pub destination: HubId,
    pub start_step: u32,
    pub deadline_step: u32,
    pub route: Vec<HubId>,
}

impl FreightTask {
    pub fn validate(&self, graph: &TransportGraph) -> Result<(), NetworkError> {
        let bad = |m: String| Err(NetworkError::Validation(format!("task {}: {m}", self.truck_id)));
        if self.route.len() < 2 {
            return bad("route needs at least two hubs".into());
        }
        if self.route.first() != Some(&self.origin) || self.route.last() != Some(&self.destination) {
            return bad("route does not run from origin to destination".into());
        }
        if graph.route_length(&self.route).is_none() {
            return bad("route uses a missing edge".into());
        }
        if self.start_step >= self.deadline_step {
            return bad("start step is not before the deadline".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    pub missions_per_zone: usize,
    /// Inclusive departure-step window.
    pub window: (u32, u32),
    pub seed: u64,
}

impl Default for MissionSpec {
    fn default() -> Self {
        // 5:00-11:00 at 5 minute steps, t = 1 at 5:00.
        Self {
            missions_per_zone: 5,
            window: (1, 73),
            seed: 0,
        }
    }
}

const MAX_PAIR_ATTEMPTS: usize = 64;

/// Samples freight missions zone by zone.
///
/// Origins and destinations are drawn in proportion to hub population and
/// routed on the zone's induced subgraph. Output depends only on the inputs.
pub fn generate_missions(
    graph: &TransportGraph,
    zones: &[Zone],
    spec: &MissionSpec,
    env: &EnvConfig,
) -> Result<Vec<FreightTask>, NetworkError> {
    let (lo, hi) = spec.window;
    if lo > hi || hi >= env.horizon_steps() {
        return Err(NetworkError::Validation(format!(
            "departure window [{lo}, {hi}] outside horizon of {} steps",
            env.horizon_steps()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tasks = Vec::with_capacity(zones.len() * spec.missions_per_zone);
    for zone in zones {
        zone.validate(graph)?;
        let sub = graph.induced(&zone.hub_ids)?;
        let ids: Vec<HubId> = zone.hub_ids.iter().copied().collect();
        let weights: Vec<u64> = ids
            .iter()
            .map(|id| sub.hub(*id).map(|h| h.population).unwrap_or(1))
            .collect();
        let picker = WeightedIndex::new(&weights)
            .map_err(|e| NetworkError::Validation(format!("zone {}: {e}", zone.id)))?;
        for _ in 0..spec.missions_per_zone {
            let route = sample_route(&sub, &ids, &picker, &mut rng)
                .ok_or(NetworkError::ZoneDisconnected(zone.id))?;
            let start_step = rng.random_range(lo..=hi);
            let length = sub.route_length(&route).expect("route from shortest_path");
            tasks.push(FreightTask {
                truck_id: tasks.len() as u32,
                origin: route[0],
                destination: *route.last().expect("non-empty route"),
                start_step,
                deadline_step: derive_deadline(length, start_step, env),
                route,
            });
        }
    }
    Ok(tasks)
}

fn sample_route(
    sub: &TransportGraph,
    ids: &[HubId],
    picker: &WeightedIndex<u64>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<HubId>> {
    for _ in 0..MAX_PAIR_ATTEMPTS {
        let origin = ids[picker.sample(rng)];
        let destination = ids[picker.sample(rng)];
        if origin == destination {
            continue;
        }
        if let Ok(route) = shortest_path(sub, origin, destination) {
            return Some(route);
        }
    }
    None
}

/// Draws `draws` origins from a zone with the same weighting the generator uses.
pub fn sample_origins(graph: &TransportGraph, zone: &Zone, draws: usize, seed: u64) -> Vec<HubId> {
    let ids: Vec<HubId> = zone.hub_ids.iter().copied().collect();
    let weights: Vec<u64> = ids
        .iter()
        .map(|id| graph.hub(*id).map(|h| h.population).unwrap_or(1))
        .collect();
    let picker = WeightedIndex::new(&weights).expect("positive populations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws).map(|_| ids[picker.sample(&mut rng)]).collect()
}
