use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionSpec, EnvConfig, Location, TruckState};
use crate::dsl::FeatureMap;
use crate::network::HubId;

/// What a truck did during the last executed step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub action: Option<ActionSpec>,
    pub speed_kmh: f64,
    pub step_km: f64,
    pub step_platoon_km: f64,
    /// Size of the platoon the truck travelled in during the step (0 when alone).
    pub platoon_size: usize,
}

/// Local observation `z_i = O_i(S)` used by the learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub location: LocationCode,
    pub edge_progress: f64,
    pub route_progress: f64,
    pub remaining_km: f64,
    pub delay_minutes: f64,
    pub slack_minutes: f64,
    pub platoon_size: usize,
    pub step_index: u32,
    pub hub_count: usize,
    pub edge_nearby_count: usize,
    pub shared_next_edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocationCode {
    Inactive,
    AtHub,
    OnEdge,
    Finished,
}

/// Who is where after a step, for the neighbourhood counts.
pub(crate) struct Occupancy {
    hubs: BTreeMap<HubId, Vec<usize>>,
    edges: BTreeMap<(HubId, HubId), Vec<(f64, usize)>>,
}

impl Occupancy {
    pub(crate) fn build(trucks: &[TruckState], step: u32) -> Self {
        let mut hubs: BTreeMap<HubId, Vec<usize>> = BTreeMap::new();
        let mut edges: BTreeMap<(HubId, HubId), Vec<(f64, usize)>> = BTreeMap::new();
        for (slot, t) in trucks.iter().enumerate() {
            if !t.needs_action(step) {
                continue;
            }
            match t.location {
                Location::AtHub(h) => hubs.entry(h).or_default().push(slot),
                Location::OnEdge {
                    from,
                    to,
                    position_km,
                } => edges.entry((from, to)).or_default().push((position_km, slot)),
            }
        }
        Self { hubs, edges }
    }

    /// (hub count, same-edge count within tolerance, co-located sharing the next edge), excluding `slot`.
    fn counts(&self, trucks: &[TruckState], slot: usize, tolerance: f64) -> (usize, usize, usize) {
        let me = &trucks[slot];
        match me.location {
            Location::AtHub(h) => {
                let here = self.hubs.get(&h).map(Vec::as_slice).unwrap_or(&[]);
                let others = here.iter().filter(|&&s| s != slot);
                let mine = me.next_edge();
                let hub_count = others.clone().count();
                let shared = others.filter(|&&s| mine.is_some() && trucks[s].next_edge() == mine).count();
                (hub_count, 0, shared)
            }
            Location::OnEdge {
                from,
                to,
                position_km,
            } => {
                let nearby = self
                    .edges
                    .get(&(from, to))
                    .map(|v| {
                        v.iter()
                            .filter(|&&(p, s)| s != slot && (p - position_km).abs() <= tolerance)
                            .count()
                    })
                    .unwrap_or(0);
                (0, nearby, 0)
            }
        }
    }
}

fn location_code(t: &TruckState, step: u32) -> LocationCode {
    if t.finished {
        LocationCode::Finished
    } else if !t.is_active(step) {
        LocationCode::Inactive
    } else if t.is_at_hub() {
        LocationCode::AtHub
    } else {
        LocationCode::OnEdge
    }
}

pub(crate) fn observe(
    trucks: &[TruckState],
    slot: usize,
    occupancy: &Occupancy,
    ledger_size: usize,
    config: &EnvConfig,
    step: u32,
) -> Observation {
    let t = &trucks[slot];
    let (hub_count, edge_nearby_count, shared_next_edge_count) =
        occupancy.counts(trucks, slot, config.catchup_tolerance_km);
    let edge_progress = match t.location {
        Location::OnEdge { position_km, .. } => position_km / t.leg_km(t.leg),
        Location::AtHub(_) => 0.0,
    };
    Observation {
        location: location_code(t, step),
        edge_progress,
        route_progress: t.traveled_km / t.route_km(),
        remaining_km: t.route_km() - t.traveled_km,
        delay_minutes: t.delay_minutes,
        slack_minutes: t.delay_cap_minutes - t.delay_minutes,
        platoon_size: ledger_size,
        step_index: step,
        hub_count,
        edge_nearby_count,
        shared_next_edge_count,
    }
}

/// Feature values handed to the reward program after a step.
pub(crate) fn snapshot(
    trucks: &[TruckState],
    slot: usize,
    trace: &StepTrace,
    occupancy: &Occupancy,
    config: &EnvConfig,
    step: u32,
) -> FeatureMap {
    let t = &trucks[slot];
    let (hub_count, nearby, shared) = if t.finished {
        (0, 0, 0)
    } else {
        occupancy.counts(trucks, slot, config.catchup_tolerance_km)
    };
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let mut f = FeatureMap::zeros();
    f.set("platoon_size", trace.platoon_size as f64);
    f.set("in_platoon", flag(trace.platoon_size >= 2));
    f.set("step_platoon_km", trace.step_platoon_km);
    f.set("delay_minutes", t.delay_minutes);
    f.set("remaining_slack_minutes", t.delay_cap_minutes - t.delay_minutes);
    f.set("hub_truck_count", hub_count as f64);
    f.set("edge_nearby_count", nearby as f64);
    f.set("shared_next_edge_count", shared as f64);
    f.set("progress_fraction", t.traveled_km / t.route_km());
    f.set("remaining_km", t.route_km() - t.traveled_km);
    f.set("is_at_hub", flag(t.is_at_hub()));
    f.set("is_finished", flag(t.finished));
    f.set("step_index", f64::from(step));
    f.set("speed_kmh", if t.finished { 0.0 } else { trace.speed_kmh });
    f.set("waited_this_step", flag(trace.action == Some(ActionSpec::Wait)));
    f
}
