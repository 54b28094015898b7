//! Builds the synthetic 41-hub network, prints its statistics and a sample
//! of population-weighted missions. Pass a path to also write the network file.

use pcrd::network::{generate_missions, synthetic_network, write_network, MissionSpec, SyntheticSpec};
use pcrd::sim::EnvConfig;

fn main() {
    let spec = SyntheticSpec::default();
    let (graph, zones) = synthetic_network(&spec).expect("synthetic network");
    let lengths: Vec<f64> = graph.edges().iter().map(|e| e.length_km).collect();
    let total: f64 = lengths.iter().sum();
    println!(
        "hubs {} | directed edges {} | zones {} | edge km min {:.1} mean {:.1} max {:.1}",
        graph.hubs().len(),
        graph.edges().len(),
        zones.len(),
        lengths.iter().copied().fold(f64::INFINITY, f64::min),
        total / lengths.len() as f64,
        lengths.iter().copied().fold(0.0, f64::max)
    );
    for z in &zones {
        println!("zone {:>2}: {:?}", z.id, z.hub_ids);
    }
    let missions = generate_missions(
        &graph,
        &zones[..1],
        &MissionSpec {
            seed: 1,
            ..MissionSpec::default()
        },
        &EnvConfig::default(),
    )
    .expect("missions");
    for m in &missions {
        println!(
            "truck {} {} -> {} start {} deadline {} route {:?}",
            m.truck_id, m.origin, m.destination, m.start_step, m.deadline_step, m.route
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, write_network(&graph, &zones)).expect("write network");
        println!("wrote {path}");
    }
}
