use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use super::{HubId, NetworkError, TransportGraph};

#[derive(Debug, PartialEq)]
struct Label {
    dist: f64,
    path: Vec<HubId>,
}

impl Eq for Label {}

impl Ord for Label {
    // Reversed so the std max-heap pops the shortest, then lexicographically smallest, path.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.path.cmp(&self.path))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-length route from `origin` to `destination`.
///
/// Among routes of equal length the lexicographically smallest hub-id sequence
/// wins, which keeps routing independent of edge insertion order.
pub fn shortest_path(
    graph: &TransportGraph,
    origin: HubId,
    destination: HubId,
) -> Result<Vec<HubId>, NetworkError> {
    for hub in [origin, destination] {
        if !graph.contains(hub) {
            return Err(NetworkError::UnknownHub(hub));
        }
    }
    let mut settled = BTreeSet::new();
    let mut heap = BinaryHeap::new();
    heap.push(Label {
        dist: 0.0,
        path: vec![origin],
    });
    while let Some(Label { dist, path }) = heap.pop() {
        let here = *path.last().expect("labels are never empty");
        if !settled.insert(here) {
            continue;
        }
        if here == destination {
            return Ok(path);
        }
        for edge in graph.outgoing(here) {
            if settled.contains(&edge.to_hub) {
                continue;
            }
            let mut next = path.clone();
            next.push(edge.to_hub);
            heap.push(Label {
                dist: dist + edge.length_km,
                path: next,
            });
        }
    }
    Err(NetworkError::NoRoute {
        from: origin,
        to: destination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Hub, RoadEdge};

    fn graph(n: u32, edges: &[(u32, u32, f64)]) -> TransportGraph {
        let hubs = (0..n)
            .map(|id| Hub {
                id,
                name: format!("h{id}"),
                lat: 0.0,
                lon: 0.0,
                population: 1,
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(from_hub, to_hub, length_km)| RoadEdge {
                from_hub,
                to_hub,
                length_km,
            })
            .collect();
        TransportGraph::new(hubs, edges).unwrap()
    }

    #[test]
    fn line_graph_has_single_route() {
        let g = graph(3, &[(0, 1, 10.0), (1, 2, 10.0)]);
        assert_eq!(shortest_path(&g, 0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn triangle_prefers_shorter_detour() {
        let g = graph(3, &[(0, 1, 5.0), (1, 2, 5.0), (0, 2, 11.0)]);
        let route = shortest_path(&g, 0, 2).unwrap();
        assert_eq!(route, vec![0, 1, 2]);
        assert_eq!(g.route_length(&route), Some(10.0));
    }

    #[test]
    fn equal_lengths_break_ties_lexicographically() {
        // Insert the C branch first so edge order cannot decide the tie.
        let g = graph(4, &[(0, 2, 4.0), (2, 3, 6.0), (0, 1, 5.0), (1, 3, 5.0)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn unreachable_destination_is_no_route() {
        let g = graph(3, &[(0, 1, 1.0), (2, 1, 1.0)]);
        assert!(matches!(
            shortest_path(&g, 0, 2),
            Err(NetworkError::NoRoute { from: 0, to: 2 })
        ));
    }

    #[test]
    fn unknown_hub_is_rejected() {
        let g = graph(2, &[(0, 1, 1.0)]);
        assert!(matches!(
            shortest_path(&g, 0, 9),
            Err(NetworkError::UnknownHub(9))
        ));
    }
}
