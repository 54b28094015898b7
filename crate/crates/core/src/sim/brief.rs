use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{EnvConfig, Objective, Scenario};
use crate::dsl::{FeatureCatalog, GRAMMAR_SUMMARY};

/// Renders the environment description handed to the language model.
///
/// The text depends only on `config`, so its hash identifies the environment.
pub fn render_environment_brief(config: &EnvConfig) -> String {
    let mut out = String::new();
    let c = config;
    let _ = writeln!(out, "# Platoon coordination environment");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Trucks drive fixed shortest routes over a directed road network of hubs. Time advances in \
         steps of {} minutes over a horizon of {} minutes ({} steps). Each truck becomes active at its \
         departure step and finishes when it reaches its destination hub. Every active, unfinished \
         truck picks one action per step from its own local observation.",
        c.dt_minutes,
        c.horizon_minutes,
        c.horizon_steps()
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "## Scenario: {:?}", c.scenario);
    let _ = writeln!(out);
    for line in scenario_rules(c) {
        let _ = writeln!(out, "- {line}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Actions");
    let _ = writeln!(out);
    let _ = writeln!(out, "- Wait: stay at the current hub for one step (adds {} delay minutes).", c.dt_minutes);
    let _ = writeln!(
        out,
        "- SpeedLow: drive at {} km/h (adds {} delay minutes per step).",
        c.v_low,
        fmt_num(c.low_speed_penalty())
    );
    let _ = writeln!(out, "- SpeedMed: drive at {} km/h (no delay change).", c.v_med);
    let _ = writeln!(
        out,
        "- SpeedHigh: drive at {} km/h (recovers {} delay minutes per step, never below zero).",
        c.v_high,
        fmt_num(c.high_speed_recovery())
    );
    let _ = writeln!(out, "- {}", menu_text(c.scenario));
    let _ = writeln!(
        out,
        "- Delay cap: each truck may accumulate at most {}% of its medium-speed trip time as delay. \
         While its delay exceeds the cap, Wait and SpeedLow are unavailable until the truck catches up.",
        fmt_num(c.delay_fraction * 100.0)
    );
    let _ = writeln!(
        out,
        "- A truck that reaches the end of an edge stops at the next hub for the rest of the step."
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "## Objective");
    let _ = writeln!(out);
    match c.objective {
        Objective::SingleObject => {
            let _ = writeln!(
                out,
                "J = {} * D_p, where D_p is the total distance (km) travelled by trucks while in a platoon, \
                 counted for every member. Delay is not part of the objective.",
                fmt_num(c.platoon_profit_per_km)
            );
        }
        Objective::MultiObject => {
            let _ = writeln!(
                out,
                "J = P_j - T_r. P_j = D_p / D_total is the share of all driven kilometres travelled in a \
                 platoon. T_r = T_d / T_total is total delay minutes over the total medium-speed trip minutes."
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Reward features");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "The reward is computed per truck after every step in which it acted. Catalog {}:",
        FeatureCatalog::VERSION
    );
    for f in FeatureCatalog::entries() {
        let _ = writeln!(out, "- {} [{}]: {}", f.name, f.units, f.description);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Reward language");
    let _ = writeln!(out);
    out.push_str(GRAMMAR_SUMMARY);
    out
}

fn scenario_rules(c: &EnvConfig) -> Vec<String> {
    let wait_rule = "Wait rule: trucks that depart from the same hub in the same step onto the same edge \
                     (at the same speed) are treated as a platoon until they arrive at the next hub."
        .to_string();
    let speed_rule = format!(
        "Speed rule: trucks on the same edge that both drive at {} km/h and are within {} km of each other \
         join the frontmost truck's position and are treated as a platoon until the next hub.",
        c.v_med,
        fmt_num(c.catchup_tolerance_km)
    );
    let common = "A platoon needs at least two trucks. Platoons dissolve at the next hub and must form again there. \
                  Platoon members that choose different actions split up."
        .to_string();
    match c.scenario {
        Scenario::Wait => vec![
            "Trucks can wait at hubs for other trucks; on edges they always drive at medium speed.".into(),
            wait_rule,
            common,
        ],
        Scenario::Speed => vec![
            "Trucks cannot wait at hubs; they adjust their speed to catch up with or wait for other trucks.".into(),
            speed_rule,
            common,
        ],
        Scenario::Mix => vec![
            "Trucks can both wait at hubs and adjust their speed on edges.".into(),
            wait_rule,
            speed_rule,
            common,
        ],
    }
}

fn menu_text(s: Scenario) -> &'static str {
    match s {
        Scenario::Wait => "Menu: at a hub {Wait, SpeedMed}; on an edge {SpeedMed}.",
        Scenario::Speed => "Menu: {SpeedLow, SpeedMed, SpeedHigh} everywhere; trucks leave hubs immediately.",
        Scenario::Mix => "Menu: at a hub {Wait, SpeedLow, SpeedMed, SpeedHigh}; on an edge {SpeedLow, SpeedMed, SpeedHigh}.",
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn brief_hash(brief: &str) -> String {
    hex::encode(Sha256::digest(brief.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wait_brief_states_wait_rule() {
        let brief = render_environment_brief(&EnvConfig::default());
        assert!(brief.contains("depart from the same hub in the same step"));
        assert!(!brief.contains("Speed rule"));
    }

    #[test]
    fn brief_is_stable() {
        let c = EnvConfig::default().with_scenario(Scenario::Mix, Objective::MultiObject);
        assert_eq!(
            brief_hash(&render_environment_brief(&c)),
            brief_hash(&render_environment_brief(&c))
        );
    }

    #[test]
    fn brief_lists_every_feature() {
        let brief = render_environment_brief(&EnvConfig::default());
        let listed = brief.lines().filter(|l| l.starts_with("- ") && l.contains("]: ")).count();
        assert_eq!(listed, 15);
        for f in FeatureCatalog::entries() {
            assert!(brief.contains(&format!("- {} [", f.name)), "{}", f.name);
        }
    }
}
