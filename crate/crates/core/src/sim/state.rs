use serde::{Deserialize, Serialize};

use super::{EnvConfig, SimError};
use crate::network::{FreightTask, HubId, TransportGraph};

pub type PlatoonId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    AtHub(HubId),
    OnEdge {
        from: HubId,
        to: HubId,
        position_km: f64,
    },
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::AtHub(h) => write!(f, "hub:{h}"),
            Location::OnEdge {
                from,
                to,
                position_km,
            } => write!(f, "edge:{from}->{to}@{position_km}"),
        }
    }
}

impl std::str::FromStr for Location {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(h) = s.strip_prefix("hub:") {
            return h.parse().map(Location::AtHub).map_err(|_| format!("bad hub in '{s}'"));
        }
        let rest = s.strip_prefix("edge:").ok_or_else(|| format!("bad location '{s}'"))?;
        let (ends, pos) = rest.split_once('@').ok_or_else(|| format!("bad location '{s}'"))?;
        let (from, to) = ends.split_once("->").ok_or_else(|| format!("bad location '{s}'"))?;
        Ok(Location::OnEdge {
            from: from.parse().map_err(|_| format!("bad location '{s}'"))?,
            to: to.parse().map_err(|_| format!("bad location '{s}'"))?,
            position_km: pos.parse().map_err(|_| format!("bad location '{s}'"))?,
        })
    }
}

/// Per-truck environment state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckState {
    pub truck_id: u32,
    pub route: Vec<HubId>,
    /// Cumulative route kilometres at each route hub; `offsets[0] == 0`.
    pub offsets: Vec<f64>,
    pub start_step: u32,
    pub deadline_step: u32,
    pub delay_cap_minutes: f64,
    /// Index of the current edge (on an edge) or the next edge to take (at a hub).
    pub leg: usize,
    pub location: Location,
    pub delay_minutes: f64,
    pub platoon_id: Option<PlatoonId>,
    pub platoon_km: f64,
    pub traveled_km: f64,
    pub finished: bool,
    pub finish_step: Option<u32>,
}

impl TruckState {
    pub fn new(task: &FreightTask, graph: &TransportGraph, config: &EnvConfig) -> Result<Self, SimError> {
        task.validate(graph).map_err(|e| SimError::Mission(e.to_string()))?;
        let mut offsets = Vec::with_capacity(task.route.len());
        let mut acc = 0.0;
        offsets.push(acc);
        for w in task.route.windows(2) {
            acc += graph.edge(w[0], w[1]).expect("validated route").length_km;
            offsets.push(acc);
        }
        Ok(Self {
            truck_id: task.truck_id,
            route: task.route.clone(),
            start_step: task.start_step,
            deadline_step: task.deadline_step,
            delay_cap_minutes: config.delay_cap_minutes(acc),
            offsets,
            leg: 0,
            location: Location::AtHub(task.origin),
            delay_minutes: 0.0,
            platoon_id: None,
            platoon_km: 0.0,
            traveled_km: 0.0,
            finished: false,
            finish_step: None,
        })
    }

    pub fn route_km(&self) -> f64 {
        *self.offsets.last().expect("route has hubs")
    }

    pub fn leg_km(&self, leg: usize) -> f64 {
        self.offsets[leg + 1] - self.offsets[leg]
    }

    pub fn is_at_hub(&self) -> bool {
        matches!(self.location, Location::AtHub(_))
    }

    pub fn is_active(&self, step: u32) -> bool {
        step >= self.start_step
    }

    /// Active and unfinished at `step`: the truck must choose an action.
    pub fn needs_action(&self, step: u32) -> bool {
        self.is_active(step) && !self.finished
    }

    pub fn current_hub(&self) -> Option<HubId> {
        match self.location {
            Location::AtHub(h) => Some(h),
            Location::OnEdge { .. } => None,
        }
    }

    /// The edge the truck is on, or will take next from its hub.
    pub fn next_edge(&self) -> Option<(HubId, HubId)> {
        (!self.finished && self.leg + 1 < self.route.len())
            .then(|| (self.route[self.leg], self.route[self.leg + 1]))
    }

    pub fn edge_position(&self) -> Option<((HubId, HubId), f64)> {
        match self.location {
            Location::OnEdge {
                from,
                to,
                position_km,
            } => Some(((from, to), position_km)),
            Location::AtHub(_) => None,
        }
    }

    /// Moves the truck `distance_km` along its route, stopping at the next hub.
    /// Returns the distance actually covered.
    pub(crate) fn advance(&mut self, distance_km: f64, step: u32) -> f64 {
        let before = self.traveled_km;
        let leg_len = self.leg_km(self.leg);
        let pos = match self.location {
            Location::AtHub(_) => 0.0,
            Location::OnEdge { position_km, .. } => position_km,
        };
        let target = pos + distance_km;
        if target >= leg_len {
            self.arrive(step);
        } else {
            self.location = Location::OnEdge {
                from: self.route[self.leg],
                to: self.route[self.leg + 1],
                position_km: target,
            };
            self.traveled_km = self.offsets[self.leg] + target;
        }
        self.traveled_km - before
    }

    /// Places an on-edge truck at `position_km` (used when a follower snaps forward).
    pub(crate) fn snap_to(&mut self, position_km: f64) {
        if let Location::OnEdge { from, to, .. } = self.location {
            self.location = Location::OnEdge {
                from,
                to,
                position_km,
            };
            self.traveled_km = self.offsets[self.leg] + position_km;
        }
    }

    fn arrive(&mut self, step: u32) {
        self.leg += 1;
        self.location = Location::AtHub(self.route[self.leg]);
        self.traveled_km = self.offsets[self.leg];
        if self.leg + 1 == self.route.len() {
            self.finished = true;
            self.finish_step = Some(step);
        }
    }

    /// Route kilometre of a location on this truck's route.
    pub fn route_position(&self, location: &Location) -> Option<f64> {
        match *location {
            Location::AtHub(h) => self.route.iter().position(|r| *r == h).map(|i| self.offsets[i]),
            Location::OnEdge {
                from, position_km, ..
            } => self
                .route
                .iter()
                .position(|r| *r == from)
                .map(|i| self.offsets[i] + position_km),
        }
    }
}
