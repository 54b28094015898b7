//! Seeded synthetic intercity network with the scale of a regional freight map:
//! 41 hubs, 202 directed edges (101 two-way corridors), 12 overlapping zones of
//! 5-9 hubs each and corridor lengths between 30 and 200 km.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::{Hub, HubId, NetworkError, RoadEdge, TransportGraph, Zone, ZONE_MAX_HUBS, ZONE_MIN_HUBS};

pub const DEFAULT_NETWORK_SEED: u64 = 2025;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub hubs: usize,
    pub corridors: usize,
    pub zones: usize,
    pub min_km: f64,
    pub max_km: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            hubs: 41,
            corridors: 101,
            zones: 12,
            min_km: 30.0,
            max_km: 200.0,
            seed: DEFAULT_NETWORK_SEED,
        }
    }
}

const LAT_RANGE: (f64, f64) = (28.6, 33.4);
const LON_RANGE: (f64, f64) = (116.2, 121.9);
const MAX_DEGREE: usize = 8;
const MAX_ATTEMPTS: usize = 500;

fn haversine_km(a: &Hub, b: &Hub) -> f64 {
    let (la1, lo1, la2, lo2) = (
        a.lat.to_radians(),
        a.lon.to_radians(),
        b.lat.to_radians(),
        b.lon.to_radians(),
    );
    let h = ((la2 - la1) / 2.0).sin().powi(2)
        + la1.cos() * la2.cos() * ((lo2 - lo1) / 2.0).sin().powi(2);
    2.0 * 6371.0 * h.sqrt().asin()
}

fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// Builds the synthetic network and its zones. Deterministic in `spec.seed`.
pub fn synthetic_network(spec: &SyntheticSpec) -> Result<(TransportGraph, Vec<Zone>), NetworkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let hubs = place_hubs(spec, &mut rng);
        let Some(pairs) = corridors(spec, &hubs, &mut rng) else {
            continue;
        };
        let edges: Vec<RoadEdge> = pairs
            .iter()
            .flat_map(|&(a, b, km)| {
                [
                    RoadEdge { from_hub: a, to_hub: b, length_km: km },
                    RoadEdge { from_hub: b, to_hub: a, length_km: km },
                ]
            })
            .collect();
        let graph = TransportGraph::new(hubs, edges)?;
        if let Some(zones) = build_zones(spec, &graph, &mut rng) {
            return Ok((graph, zones));
        }
    }
    Err(NetworkError::Validation(
        "could not satisfy synthetic network constraints".into(),
    ))
}

fn place_hubs(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<Hub> {
    let population = LogNormal::new((1.5e6f64).ln(), 0.8).expect("valid lognormal");
    // Straight-line separation that still leaves room for the minimum road length.
    let min_sep = spec.min_km / 1.15;
    let mut hubs: Vec<Hub> = Vec::with_capacity(spec.hubs);
    while hubs.len() < spec.hubs {
        let id = hubs.len() as HubId;
        let candidate = Hub {
            id,
            name: format!("hub_{id:02}"),
            lat: round_to(rng.random_range(LAT_RANGE.0..LAT_RANGE.1), 4),
            lon: round_to(rng.random_range(LON_RANGE.0..LON_RANGE.1), 4),
            population: 0,
        };
        if hubs.iter().all(|h| haversine_km(h, &candidate) >= min_sep) {
            let pop: f64 = population.sample(rng);
            let pop = (pop.clamp(1.5e5, 2.5e7) / 1000.0).round() as u64 * 1000;
            hubs.push(Hub { population: pop, ..candidate });
        }
    }
    hubs
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Spanning tree by Kruskal, then shortest remaining pairs up to the corridor count.
fn corridors(
    spec: &SyntheticSpec,
    hubs: &[Hub],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(HubId, HubId, f64)>> {
    let mut candidates = Vec::new();
    for i in 0..hubs.len() {
        for j in i + 1..hubs.len() {
            let detour = rng.random_range(1.15..1.35);
            let km = round_to(haversine_km(&hubs[i], &hubs[j]) * detour, 1);
            if (spec.min_km..=spec.max_km).contains(&km) {
                candidates.push((i, j, km));
            }
        }
    }
    candidates.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));

    let mut parent: Vec<usize> = (0..hubs.len()).collect();
    let mut degree = vec![0usize; hubs.len()];
    let mut chosen = BTreeSet::new();
    for (idx, &(i, j, _)) in candidates.iter().enumerate() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            degree[i] += 1;
            degree[j] += 1;
            chosen.insert(idx);
        }
    }
    if chosen.len() + 1 != hubs.len() {
        return None;
    }
    for (idx, &(i, j, _)) in candidates.iter().enumerate() {
        if chosen.len() == spec.corridors {
            break;
        }
        if chosen.contains(&idx) || degree[i] >= MAX_DEGREE || degree[j] >= MAX_DEGREE {
            continue;
        }
        degree[i] += 1;
        degree[j] += 1;
        chosen.insert(idx);
    }
    if chosen.len() != spec.corridors {
        return None;
    }
    Some(
        chosen
            .into_iter()
            .map(|idx| {
                let (i, j, km) = candidates[idx];
                (hubs[i].id, hubs[j].id, km)
            })
            .collect(),
    )
}

/// Hubs of `graph` in order of shortest-path distance from `center`.
fn distance_order(graph: &TransportGraph, center: HubId) -> Vec<HubId> {
    let mut dist: BTreeMap<HubId, f64> = BTreeMap::new();
    let mut done: BTreeSet<HubId> = BTreeSet::new();
    let mut order = Vec::new();
    dist.insert(center, 0.0);
    loop {
        let next = dist
            .iter()
            .filter(|(h, _)| !done.contains(h))
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(h, d)| (*h, *d));
        let Some((here, d)) = next else { break };
        done.insert(here);
        order.push(here);
        for e in graph.outgoing(here) {
            let cand = d + e.length_km;
            let slot = dist.entry(e.to_hub).or_insert(f64::INFINITY);
            if cand < *slot {
                *slot = cand;
            }
        }
    }
    order
}

/// Grows each zone as a distance ball around an uncovered hub. A prefix of the
/// Dijkstra order is connected through the shortest-path tree, and every
/// corridor is two-way, so each zone's induced subgraph is strongly connected.
fn build_zones(spec: &SyntheticSpec, graph: &TransportGraph, rng: &mut ChaCha8Rng) -> Option<Vec<Zone>> {
    for _ in 0..100 {
        let mut covered = BTreeSet::new();
        let mut zones = Vec::with_capacity(spec.zones);
        for zid in 0..spec.zones {
            let uncovered: Vec<HubId> = graph
                .hubs()
                .iter()
                .map(|h| h.id)
                .filter(|h| !covered.contains(h))
                .collect();
            let center = if uncovered.is_empty() {
                graph.hubs()[rng.random_range(0..graph.hubs().len())].id
            } else {
                uncovered[rng.random_range(0..uncovered.len())]
            };
            let size = rng.random_range(ZONE_MIN_HUBS..=ZONE_MAX_HUBS);
            let hub_ids: BTreeSet<HubId> = distance_order(graph, center).into_iter().take(size).collect();
            covered.extend(hub_ids.iter().copied());
            zones.push(Zone { id: zid as u32, hub_ids });
        }
        if covered.len() == graph.hubs().len() {
            return Some(zones);
        }
    }
    None
}
