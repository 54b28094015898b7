//! Transportation graph, zones, routing and freight-mission generation.

mod graph;
mod io;
mod missions;
mod routing;
mod synthetic;

pub use graph::{Hub, HubId, RoadEdge, TransportGraph, Zone, ZONE_MAX_HUBS, ZONE_MIN_HUBS};
pub use io::{load_graph, parse_missions, parse_network, write_missions, write_network, NetworkFile};
pub use missions::{generate_missions, sample_origins, FreightTask, MissionSpec};
pub use routing::shortest_path;
pub use synthetic::{synthetic_network, SyntheticSpec, DEFAULT_NETWORK_SEED};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid network: {0}")]
    Validation(String),
    #[error("unknown hub {0}")]
    UnknownHub(HubId),
    #[error("no route from hub {from} to hub {to}")]
    NoRoute { from: HubId, to: HubId },
    #[error("zone {0} has no routable origin/destination pair")]
    ZoneDisconnected(u32),
    #[error("{0}")]
    Io(String),
}

/// The bundled synthetic network file.
pub const BUNDLED_NETWORK: &str = include_str!("../../data/synthetic_delta.net");

pub fn bundled_network() -> NetworkFile {
    parse_network(BUNDLED_NETWORK).expect("bundled network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_network_matches_generator() {
        let bundled = bundled_network();
        assert_eq!(bundled.graph.hubs().len(), 41);
        assert_eq!(bundled.graph.edges().len(), 202);
        assert_eq!(bundled.zones.len(), 12);
        let (graph, zones) = synthetic_network(&SyntheticSpec::default()).unwrap();
        assert_eq!(write_network(&graph, &zones), BUNDLED_NETWORK);
        for hub in bundled.graph.hubs() {
            assert!(bundled.graph.has_neighbour(hub.id));
        }
    }
}
