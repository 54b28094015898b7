use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::NetworkError;

pub type HubId = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hub {
    pub id: HubId,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub population: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub from_hub: HubId,
    pub to_hub: HubId,
    pub length_km: f64,
}

/// A group of hubs inside which freight missions are sampled and routed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub id: u32,
    pub hub_ids: BTreeSet<HubId>,
}

pub const ZONE_MIN_HUBS: usize = 5;
pub const ZONE_MAX_HUBS: usize = 9;

/// Directed hub/edge network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportGraph {
    hubs: Vec<Hub>,
    edges: Vec<RoadEdge>,
    hub_index: BTreeMap<HubId, usize>,
    adjacency: BTreeMap<HubId, Vec<usize>>,
}

impl TransportGraph {
    /// Builds a graph and checks every structural invariant.
    pub fn new(hubs: Vec<Hub>, edges: Vec<RoadEdge>) -> Result<Self, NetworkError> {
        let mut hub_index = BTreeMap::new();
        for (i, hub) in hubs.iter().enumerate() {
            if hub.population == 0 {
                return Err(NetworkError::Validation(format!(
                    "hub {} has non-positive population",
                    hub.id
                )));
            }
            if !hub.lat.is_finite() || !hub.lon.is_finite() {
                return Err(NetworkError::Validation(format!(
                    "hub {} has non-finite coordinates",
                    hub.id
                )));
            }
            if hub_index.insert(hub.id, i).is_some() {
                return Err(NetworkError::Validation(format!("duplicate hub id {}", hub.id)));
            }
        }
        let mut adjacency: BTreeMap<HubId, Vec<usize>> =
            hubs.iter().map(|h| (h.id, Vec::new())).collect();
        let mut seen = BTreeSet::new();
        for (i, edge) in edges.iter().enumerate() {
            for end in [edge.from_hub, edge.to_hub] {
                if !hub_index.contains_key(&end) {
                    return Err(NetworkError::Validation(format!(
                        "edge {}->{} references unknown hub {}",
                        edge.from_hub, edge.to_hub, end
                    )));
                }
            }
            if edge.from_hub == edge.to_hub {
                return Err(NetworkError::Validation(format!(
                    "edge {}->{} is a self-loop",
                    edge.from_hub, edge.to_hub
                )));
            }
            if !(edge.length_km.is_finite() && edge.length_km > 0.0) {
                return Err(NetworkError::Validation(format!(
                    "edge {}->{} has non-positive length",
                    edge.from_hub, edge.to_hub
                )));
            }
            if !seen.insert((edge.from_hub, edge.to_hub)) {
                return Err(NetworkError::Validation(format!(
                    "duplicate edge {}->{}",
                    edge.from_hub, edge.to_hub
                )));
            }
            adjacency.entry(edge.from_hub).or_default().push(i);
        }
        for out in adjacency.values_mut() {
            out.sort_by_key(|&i| edges[i].to_hub);
        }
        Ok(Self {
            hubs,
            edges,
            hub_index,
            adjacency,
        })
    }

    pub fn hubs(&self) -> &[Hub] {
        &self.hubs
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn hub(&self, id: HubId) -> Option<&Hub> {
        self.hub_index.get(&id).map(|&i| &self.hubs[i])
    }

    pub fn contains(&self, id: HubId) -> bool {
        self.hub_index.contains_key(&id)
    }

    /// Outgoing edges of `id`, ordered by destination hub id.
    pub fn outgoing(&self, id: HubId) -> impl Iterator<Item = &RoadEdge> + '_ {
        self.adjacency
            .get(&id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    pub fn edge(&self, from: HubId, to: HubId) -> Option<&RoadEdge> {
        self.outgoing(from).find(|e| e.to_hub == to)
    }

    /// Total length of a hub sequence, or `None` if two consecutive hubs are not joined by an edge.
    pub fn route_length(&self, route: &[HubId]) -> Option<f64> {
        route
            .windows(2)
            .map(|w| self.edge(w[0], w[1]).map(|e| e.length_km))
            .sum()
    }

    /// Subgraph induced by `ids`: those hubs plus every edge with both ends among them.
    pub fn induced(&self, ids: &BTreeSet<HubId>) -> Result<Self, NetworkError> {
        let hubs = self
            .hubs
            .iter()
            .filter(|h| ids.contains(&h.id))
            .cloned()
            .collect::<Vec<_>>();
        if hubs.len() != ids.len() {
            return Err(NetworkError::Validation(
                "zone references a hub missing from the graph".into(),
            ));
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| ids.contains(&e.from_hub) && ids.contains(&e.to_hub))
            .copied()
            .collect();
        Self::new(hubs, edges)
    }

    /// True when at least one edge enters or leaves `id`.
    pub fn has_neighbour(&self, id: HubId) -> bool {
        self.outgoing(id).next().is_some() || self.edges.iter().any(|e| e.to_hub == id)
    }
}

impl Zone {
    pub fn validate(&self, graph: &TransportGraph) -> Result<(), NetworkError> {
        let n = self.hub_ids.len();
        if !(ZONE_MIN_HUBS..=ZONE_MAX_HUBS).contains(&n) {
            return Err(NetworkError::Validation(format!(
                "zone {} has {} hubs, expected {}..={}",
                self.id, n, ZONE_MIN_HUBS, ZONE_MAX_HUBS
            )));
        }
        if let Some(missing) = self.hub_ids.iter().find(|h| !graph.contains(**h)) {
            return Err(NetworkError::Validation(format!(
                "zone {} references unknown hub {}",
                self.id, missing
            )));
        }
        Ok(())
    }
}
