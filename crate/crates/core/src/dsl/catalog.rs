use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub units: &'static str,
}

const fn info(name: &'static str, units: &'static str, description: &'static str) -> FeatureInfo {
    FeatureInfo {
        name,
        description,
        units,
    }
}

const ENTRIES: [FeatureInfo; 15] = [
    info("platoon_size", "trucks", "size of the platoon the truck travelled in this step, 0 when alone"),
    info("in_platoon", "0/1", "1 if the truck travelled in a platoon this step"),
    info("step_platoon_km", "km", "distance covered in a platoon this step"),
    info("delay_minutes", "min", "accumulated delay of the truck"),
    info("remaining_slack_minutes", "min", "delay cap minus accumulated delay (negative when over the cap)"),
    info("hub_truck_count", "trucks", "other active trucks at the same hub"),
    info("edge_nearby_count", "trucks", "other trucks on the same edge within the catch-up tolerance"),
    info("shared_next_edge_count", "trucks", "other trucks at the same hub whose next edge is the same"),
    info("progress_fraction", "fraction", "share of the route already driven, 0 to 1"),
    info("remaining_km", "km", "route distance still to drive"),
    info("is_at_hub", "0/1", "1 if the truck is standing at a hub"),
    info("is_finished", "0/1", "1 once the truck has reached its destination"),
    info("step_index", "step", "index of the step just executed, starting at 1"),
    info("speed_kmh", "km/h", "speed driven this step, 0 when waiting or finished"),
    info("waited_this_step", "0/1", "1 if the truck chose Wait this step"),
];

pub const FEATURE_COUNT: usize = ENTRIES.len();

/// Names the reward language may reference, with units and descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCatalog;

impl FeatureCatalog {
    pub const VERSION: &'static str = "features/v1";

    pub fn entries() -> &'static [FeatureInfo] {
        &ENTRIES
    }

    pub fn index_of(name: &str) -> Option<usize> {
        ENTRIES.iter().position(|e| e.name == name)
    }

    pub fn contains(name: &str) -> bool {
        Self::index_of(name).is_some()
    }
}

/// One value per catalog feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    values: [f64; FEATURE_COUNT],
}

impl FeatureMap {
    pub fn zeros() -> Self {
        Self {
            values: [0.0; FEATURE_COUNT],
        }
    }

    pub fn filled(value: f64) -> Self {
        Self {
            values: [value; FEATURE_COUNT],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FeatureCatalog::index_of(name).map(|i| self.values[i])
    }

    pub(crate) fn at(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Panics on a name outside the catalog.
    pub fn set(&mut self, name: &str, value: f64) {
        let i = FeatureCatalog::index_of(name).unwrap_or_else(|| panic!("unknown feature '{name}'"));
        self.values[i] = value;
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        ENTRIES.iter().zip(self.values.iter()).map(|(e, v)| (e.name, *v))
    }
}

/// Feature maps used to smoke-test a candidate before training.
pub fn probe_features() -> Vec<FeatureMap> {
    let typical = FeatureMap::zeros()
        .with("platoon_size", 2.0)
        .with("in_platoon", 1.0)
        .with("step_platoon_km", 6.25)
        .with("delay_minutes", 5.0)
        .with("remaining_slack_minutes", 3.0)
        .with("hub_truck_count", 1.0)
        .with("shared_next_edge_count", 1.0)
        .with("progress_fraction", 0.4)
        .with("remaining_km", 60.0)
        .with("step_index", 12.0)
        .with("speed_kmh", 75.0);
    let waiting = FeatureMap::zeros()
        .with("delay_minutes", 10.0)
        .with("remaining_slack_minutes", -2.0)
        .with("hub_truck_count", 2.0)
        .with("is_at_hub", 1.0)
        .with("remaining_km", 100.0)
        .with("step_index", 3.0)
        .with("waited_this_step", 1.0);
    let finished = FeatureMap::zeros()
        .with("is_finished", 1.0)
        .with("is_at_hub", 1.0)
        .with("progress_fraction", 1.0)
        .with("step_index", 40.0);
    vec![FeatureMap::zeros(), FeatureMap::filled(1.0), typical, waiting, finished]
}
