//! Platoon formation, maintenance and dissolution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionSpec, EnvConfig, Location, PlatoonId, Scenario, TruckState};
use crate::network::HubId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platoon {
    /// Truck slots (indices into the environment's truck list), ascending.
    pub members: Vec<usize>,
    pub formed_at: Location,
    pub formed_step: u32,
}

/// Active platoons. Each truck belongs to at most one; every platoon has two or more members.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlatoonLedger {
    pub platoons: BTreeMap<PlatoonId, Platoon>,
    next_id: PlatoonId,
}

impl PlatoonLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.platoons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.platoons.is_empty()
    }

    pub fn size_of(&self, id: PlatoonId) -> usize {
        self.platoons.get(&id).map_or(0, |p| p.members.len())
    }

    fn create(&mut self, trucks: &mut [TruckState], mut members: Vec<usize>, step: u32) -> PlatoonId {
        members.sort_unstable();
        let id = self.next_id;
        self.next_id += 1;
        for &m in &members {
            trucks[m].platoon_id = Some(id);
        }
        let formed_at = trucks[members[0]].location;
        self.platoons.insert(
            id,
            Platoon {
                members,
                formed_at,
                formed_step: step,
            },
        );
        id
    }

    fn disband(&mut self, trucks: &mut [TruckState], id: PlatoonId) -> Vec<usize> {
        let members = self.platoons.remove(&id).map(|p| p.members).unwrap_or_default();
        for &m in &members {
            trucks[m].platoon_id = None;
        }
        members
    }

    /// Removes trucks standing at a hub from their platoons and drops platoons left with one member.
    pub fn dissolve_at_hubs(&mut self, trucks: &mut [TruckState]) {
        let ids: Vec<PlatoonId> = self.platoons.keys().copied().collect();
        for id in ids {
            let platoon = self.platoons.get_mut(&id).expect("listed id");
            let (arrived, staying): (Vec<usize>, Vec<usize>) =
                platoon.members.iter().partition(|&&m| trucks[m].is_at_hub());
            if arrived.is_empty() {
                continue;
            }
            platoon.members = staying;
            for m in arrived {
                trucks[m].platoon_id = None;
            }
            if self.platoons[&id].members.len() < 2 {
                self.disband(trucks, id);
            }
        }
    }

    /// Checks the ledger against truck states. Used by tests and debug assertions.
    pub fn check(&self, trucks: &[TruckState]) -> Result<(), String> {
        let mut seen = BTreeMap::new();
        for (id, p) in &self.platoons {
            if p.members.len() < 2 {
                return Err(format!("platoon {id} has {} members", p.members.len()));
            }
            let first = trucks[p.members[0]].location;
            for &m in &p.members {
                if seen.insert(m, *id).is_some() {
                    return Err(format!("truck slot {m} in two platoons"));
                }
                if trucks[m].platoon_id != Some(*id) {
                    return Err(format!("truck slot {m} does not record platoon {id}"));
                }
                if trucks[m].location != first {
                    return Err(format!("platoon {id} members are not co-located"));
                }
            }
        }
        for (slot, t) in trucks.iter().enumerate() {
            if let Some(id) = t.platoon_id {
                if seen.get(&slot) != Some(&id) {
                    return Err(format!("truck slot {slot} claims unknown platoon {id}"));
                }
            }
        }
        Ok(())
    }
}

/// Applies the formation rules after this step's kinematics.
///
/// * Existing platoons stay together only while members pick the same action;
///   members that diverge split into new groups (singletons leave).
/// * Wait and Mix: trucks leaving the same hub in the same step onto the same
///   edge at the same speed form a platoon.
/// * Speed and Mix: trucks on one edge that all chose the medium speed and lie
///   within the catch-up tolerance of the frontmost truck are snapped to its
///   position and merged.
///
/// `departures[i]` is the edge truck `i` entered from a hub this step.
pub fn update_platoons(
    trucks: &mut [TruckState],
    actions: &[Option<ActionSpec>],
    departures: &[Option<(HubId, HubId)>],
    ledger: &mut PlatoonLedger,
    config: &EnvConfig,
    step: u32,
) {
    split_divergent(trucks, actions, ledger, step);

    if matches!(config.scenario, Scenario::Wait | Scenario::Mix) {
        let mut groups: BTreeMap<(HubId, HubId, ActionSpec), Vec<usize>> = BTreeMap::new();
        for (slot, dep) in departures.iter().enumerate() {
            if let (Some((from, to)), Some(action)) = (dep, actions[slot]) {
                groups.entry((*from, *to, action)).or_default().push(slot);
            }
        }
        for members in groups.into_values().filter(|m| m.len() >= 2) {
            ledger.create(trucks, members, step);
        }
    }

    if matches!(config.scenario, Scenario::Speed | Scenario::Mix) {
        merge_catchups(trucks, actions, ledger, config, step);
    }
}

fn split_divergent(
    trucks: &mut [TruckState],
    actions: &[Option<ActionSpec>],
    ledger: &mut PlatoonLedger,
    step: u32,
) {
    let ids: Vec<PlatoonId> = ledger.platoons.keys().copied().collect();
    for id in ids {
        let members = &ledger.platoons[&id].members;
        let mut by_action: Vec<(Option<ActionSpec>, Vec<usize>)> = Vec::new();
        for &m in members {
            match by_action.iter_mut().find(|(a, _)| *a == actions[m]) {
                Some((_, group)) => group.push(m),
                None => by_action.push((actions[m], vec![m])),
            }
        }
        if by_action.len() == 1 {
            continue;
        }
        ledger.disband(trucks, id);
        for (_, group) in by_action {
            if group.len() >= 2 {
                ledger.create(trucks, group, step);
            }
        }
    }
}

fn merge_catchups(
    trucks: &mut [TruckState],
    actions: &[Option<ActionSpec>],
    ledger: &mut PlatoonLedger,
    config: &EnvConfig,
    step: u32,
) {
    let mut by_edge: BTreeMap<(HubId, HubId), Vec<(f64, usize)>> = BTreeMap::new();
    for (slot, t) in trucks.iter().enumerate() {
        if actions[slot] != Some(ActionSpec::SpeedMed) {
            continue;
        }
        if let Some((edge, pos)) = t.edge_position() {
            by_edge.entry(edge).or_default().push((pos, slot));
        }
    }
    for mut riders in by_edge.into_values() {
        riders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut i = 0;
        while i < riders.len() {
            let lead_pos = riders[i].0;
            let mut j = i + 1;
            while j < riders.len() && lead_pos - riders[j].0 <= config.catchup_tolerance_km {
                j += 1;
            }
            let cluster: Vec<usize> = riders[i..j].iter().map(|&(_, s)| s).collect();
            i = j;
            if cluster.len() < 2 {
                continue;
            }
            let existing: Vec<PlatoonId> = {
                let mut ids: Vec<PlatoonId> = cluster.iter().filter_map(|&s| trucks[s].platoon_id).collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            };
            let already_whole = existing.len() == 1
                && cluster.iter().all(|&s| trucks[s].platoon_id == Some(existing[0]))
                && ledger.size_of(existing[0]) == cluster.len();
            if already_whole {
                continue;
            }
            for id in existing {
                let members = ledger.disband(trucks, id);
                debug_assert!(members.iter().all(|m| cluster.contains(m)));
            }
            for &s in &cluster {
                trucks[s].snap_to(lead_pos);
            }
            ledger.create(trucks, cluster, step);
        }
    }
}
