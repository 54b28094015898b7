//! Line-oriented text formats for networks and mission lists.
//!
//! Network files hold `HUB`, `EDGE` and `ZONE` records; mission files hold
//! `TASK` records. Blank lines and `#` comments are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{FreightTask, Hub, NetworkError, RoadEdge, TransportGraph, Zone};

/// A parsed network file: the graph plus any zones it declares.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub graph: TransportGraph,
    pub zones: Vec<Zone>,
}

fn field<T: FromStr>(tokens: &[&str], idx: usize, line: usize, what: &str) -> Result<T, NetworkError> {
    let raw = tokens.get(idx).ok_or_else(|| NetworkError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    raw.parse().map_err(|_| NetworkError::Parse {
        line,
        message: format!("invalid {what} '{raw}'"),
    })
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

pub fn parse_network(text: &str) -> Result<NetworkFile, NetworkError> {
    let mut hubs = Vec::new();
    let mut edges = Vec::new();
    let mut zones = Vec::new();
    for (line, tokens) in records(text) {
        match tokens[0] {
            "HUB" => {
                if tokens.len() != 6 {
                    return Err(NetworkError::Parse {
                        line,
                        message: format!("HUB expects 5 fields, found {}", tokens.len() - 1),
                    });
                }
                hubs.push(Hub {
                    id: field(&tokens, 1, line, "hub id")?,
                    name: tokens[2].to_string(),
                    lat: field(&tokens, 3, line, "latitude")?,
                    lon: field(&tokens, 4, line, "longitude")?,
                    population: field(&tokens, 5, line, "population")?,
                });
            }
            "EDGE" => {
                if tokens.len() != 4 {
                    return Err(NetworkError::Parse {
                        line,
                        message: format!("EDGE expects 3 fields, found {}", tokens.len() - 1),
                    });
                }
                edges.push(RoadEdge {
                    from_hub: field(&tokens, 1, line, "from hub id")?,
                    to_hub: field(&tokens, 2, line, "to hub id")?,
                    length_km: field(&tokens, 3, line, "edge length")?,
                });
            }
            "ZONE" => {
                let id = field(&tokens, 1, line, "zone id")?;
                let hub_ids = (2..tokens.len())
                    .map(|i| field(&tokens, i, line, "zone hub id"))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                zones.push(Zone { id, hub_ids });
            }
            other => {
                return Err(NetworkError::Parse {
                    line,
                    message: format!("unknown record type '{other}'"),
                })
            }
        }
    }
    let graph = TransportGraph::new(hubs, edges)?;
    for zone in &zones {
        zone.validate(&graph)?;
    }
    Ok(NetworkFile { graph, zones })
}

pub fn load_graph(path: &std::path::Path) -> Result<NetworkFile, NetworkError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| NetworkError::Io(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

pub fn write_network(graph: &TransportGraph, zones: &[Zone]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} hubs, {} directed edges, {} zones",
        graph.hubs().len(),
        graph.edges().len(),
        zones.len()
    );
    for h in graph.hubs() {
        let _ = writeln!(
            out,
            "HUB {} {} {:.4} {:.4} {}",
            h.id, h.name, h.lat, h.lon, h.population
        );
    }
    for e in graph.edges() {
        let _ = writeln!(out, "EDGE {} {} {:.1}", e.from_hub, e.to_hub, e.length_km);
    }
    for z in zones {
        let ids = z.hub_ids.iter().map(|h| h.to_string()).collect::<Vec<_>>();
        let _ = writeln!(out, "ZONE {} {}", z.id, ids.join(" "));
    }
    out
}

pub fn write_missions(tasks: &[FreightTask]) -> String {
    let mut out = String::new();
    for t in tasks {
        let route = t.route.iter().map(|h| h.to_string()).collect::<Vec<_>>();
        let _ = writeln!(
            out,
            "TASK {} {} {} {} {} {}",
            t.truck_id,
            t.origin,
            t.destination,
            t.start_step,
            t.deadline_step,
            route.join(",")
        );
    }
    out
}

/// Reads a mission file and checks each route against `graph`.
pub fn parse_missions(text: &str, graph: &TransportGraph) -> Result<Vec<FreightTask>, NetworkError> {
    let mut tasks = Vec::new();
    for (line, tokens) in records(text) {
        if tokens[0] != "TASK" || tokens.len() != 7 {
            return Err(NetworkError::Parse {
                line,
                message: "expected TASK <truck> <origin> <dest> <start> <deadline> <route>".into(),
            });
        }
        let route = tokens[6]
            .split(',')
            .map(|h| {
                h.parse().map_err(|_| NetworkError::Parse {
                    line,
                    message: format!("invalid route hub '{h}'"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let task = FreightTask {
            truck_id: field(&tokens, 1, line, "truck id")?,
            origin: field(&tokens, 2, line, "origin")?,
            destination: field(&tokens, 3, line, "destination")?,
            start_step: field(&tokens, 4, line, "start step")?,
            deadline_step: field(&tokens, 5, line, "deadline step")?,
            route,
        };
        task.validate(graph)?;
        tasks.push(task);
    }
    Ok(tasks)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_HUBS: &str = "\
# tiny fixture
HUB 1 alpha 31.2000 121.4000 100
HUB 2 beta 31.3000 121.5000 200   # trailing comment
EDGE 1 2 42.5
";

    #[test]
    fn loads_two_hub_fixture() {
        let net = parse_network(TWO_HUBS).unwrap();
        assert_eq!(net.graph.hubs().len(), 2);
        assert_eq!(net.graph.edges().len(), 1);
        assert_eq!(net.graph.edge(1, 2).unwrap().length_km, 42.5);
    }

    #[test]
    fn unknown_hub_is_validation_error() {
        let text = format!("{TWO_HUBS}EDGE 2 7 10.0\n");
        let err = parse_network(&text).unwrap_err();
        assert!(matches!(err, NetworkError::Validation(ref m) if m.contains("unknown hub 7")), "{err}");
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = "HUB 1 a 0 0 10\nHUB 2 b 0 x 10\n";
        match parse_network(text).unwrap_err() {
            NetworkError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn zero_population_rejected() {
        let err = parse_network("HUB 1 a 0 0 0\n").unwrap_err();
        assert!(matches!(err, NetworkError::Validation(_)));
    }

    #[test]
    fn network_text_round_trips() {
        let net = parse_network(TWO_HUBS).unwrap();
        let again = parse_network(&write_network(&net.graph, &net.zones)).unwrap();
        assert_eq!(net, again);
    }
}
