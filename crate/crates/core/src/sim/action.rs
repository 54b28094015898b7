use serde::{Deserialize, Serialize};

use super::{EnvConfig, Scenario, TruckState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionSpec {
    Wait,
    SpeedLow,
    SpeedMed,
    SpeedHigh,
}

impl ActionSpec {
    pub const ALL: [ActionSpec; 4] = [Self::Wait, Self::SpeedLow, Self::SpeedMed, Self::SpeedHigh];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn speed_kmh(self, config: &EnvConfig) -> f64 {
        match self {
            Self::Wait => 0.0,
            Self::SpeedLow => config.v_low,
            Self::SpeedMed => config.v_med,
            Self::SpeedHigh => config.v_high,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Wait => "Wait",
            Self::SpeedLow => "SpeedLow",
            Self::SpeedMed => "SpeedMed",
            Self::SpeedHigh => "SpeedHigh",
        }
    }
}

impl std::fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ActionSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown action '{s}'"))
    }
}

/// Small set of legal actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ActionMask(u8);

impl ActionMask {
    pub const EMPTY: ActionMask = ActionMask(0);

    pub fn of(actions: &[ActionSpec]) -> Self {
        actions.iter().fold(Self::EMPTY, |m, a| m.with(*a))
    }

    pub fn with(self, a: ActionSpec) -> Self {
        Self(self.0 | 1 << a.index())
    }

    pub fn without(self, a: ActionSpec) -> Self {
        Self(self.0 & !(1 << a.index()))
    }

    pub fn contains(self, a: ActionSpec) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = ActionSpec> {
        ActionSpec::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

/// Legal actions for an unfinished truck under the scenario menu and delay cap.
///
/// Panics if the truck has already finished.
pub fn action_mask(state: &TruckState, config: &EnvConfig) -> ActionMask {
    assert!(!state.finished, "finished trucks have no actions");
    use ActionSpec::*;
    let at_hub = state.is_at_hub();
    let menu = match (config.scenario, at_hub) {
        (Scenario::Wait, true) => ActionMask::of(&[Wait, SpeedMed]),
        (Scenario::Wait, false) => ActionMask::of(&[SpeedMed]),
        (Scenario::Speed, _) | (Scenario::Mix, false) => ActionMask::of(&[SpeedLow, SpeedMed, SpeedHigh]),
        (Scenario::Mix, true) => ActionMask::of(&[Wait, SpeedLow, SpeedMed, SpeedHigh]),
    };
    if state.delay_minutes > state.delay_cap_minutes {
        menu.without(Wait).without(SpeedLow)
    } else {
        menu
    }
}
