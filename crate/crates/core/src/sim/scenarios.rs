//! Small hand-built scenarios for tests, examples and benchmarks.

use super::{derive_deadline, EnvConfig, EnvFactory, Objective, Scenario};
use crate::network::{FreightTask, Hub, HubId, RoadEdge, TransportGraph};

/// Hubs `0..n` joined in a line by two-way edges of `edge_km`.
pub fn line_graph(n: u32, edge_km: f64) -> TransportGraph {
    let hubs = (0..n)
        .map(|id| Hub {
            id,
            name: format!("L{id}"),
            lat: 30.0,
            lon: 120.0 + 0.5 * f64::from(id),
            population: 1000,
        })
        .collect();
    let edges = (1..n)
        .flat_map(|id| {
            [
                RoadEdge {
                    from_hub: id - 1,
                    to_hub: id,
                    length_km: edge_km,
                },
                RoadEdge {
                    from_hub: id,
                    to_hub: id - 1,
                    length_km: edge_km,
                },
            ]
        })
        .collect();
    TransportGraph::new(hubs, edges).expect("line graph is valid")
}

/// A task along `route` with its deadline derived from the route length.
pub fn task_on(graph: &TransportGraph, truck_id: u32, route: &[HubId], start_step: u32, config: &EnvConfig) -> FreightTask {
    let km = graph.route_length(route).expect("route follows graph edges");
    FreightTask {
        truck_id,
        origin: route[0],
        destination: *route.last().expect("non-empty route"),
        start_step,
        deadline_step: derive_deadline(km, start_step, config),
        route: route.to_vec(),
    }
}

/// Two trucks on a three-hub line with 50 km edges. The second truck starts
/// two steps later, so the first must wait at the origin to platoon.
pub fn line_scenario(objective: Objective) -> EnvFactory {
    let config = EnvConfig::default().with_scenario(Scenario::Wait, objective);
    let graph = line_graph(3, 50.0);
    let missions = vec![
        task_on(&graph, 0, &[0, 1, 2], 1, &config),
        task_on(&graph, 1, &[0, 1, 2], 3, &config),
    ];
    EnvFactory::new(graph, missions, config)
}

/// Two trucks leaving together over one 50 km edge.
pub fn single_edge_pair(objective: Objective) -> EnvFactory {
    let config = EnvConfig::default().with_scenario(Scenario::Wait, objective);
    let graph = line_graph(2, 50.0);
    let missions = vec![task_on(&graph, 0, &[0, 1], 1, &config), task_on(&graph, 1, &[0, 1], 1, &config)];
    EnvFactory::new(graph, missions, config)
}
