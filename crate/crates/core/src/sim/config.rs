use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    Wait,
    Speed,
    Mix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    SingleObject,
    MultiObject,
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wait" => Ok(Self::Wait),
            "speed" => Ok(Self::Speed),
            "mix" => Ok(Self::Mix),
            _ => Err(format!("unknown scenario '{s}' (wait|speed|mix)")),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "single" | "singleobject" | "single-object" => Ok(Self::SingleObject),
            "multi" | "multiobject" | "multi-object" => Ok(Self::MultiObject),
            _ => Err(format!("unknown objective '{s}' (single|multi)")),
        }
    }
}

/// Simulation constants. Defaults follow the published experiment setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub dt_minutes: u32,
    pub horizon_minutes: u32,
    pub v_low: f64,
    pub v_med: f64,
    pub v_high: f64,
    /// Fuel profit per platoon kilometre, `c_p`.
    pub platoon_profit_per_km: f64,
    /// Allowed delay as a fraction of the medium-speed trip time.
    pub delay_fraction: f64,
    pub scenario: Scenario,
    pub objective: Objective,
    pub catchup_tolerance_km: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt_minutes: 5,
            horizon_minutes: 1000,
            v_low: 60.0,
            v_med: 75.0,
            v_high: 90.0,
            platoon_profit_per_km: 1.7,
            delay_fraction: 0.1,
            scenario: Scenario::Wait,
            objective: Objective::SingleObject,
            // (v_high - v_med) * dt / 60: one step of maximum closing distance.
            catchup_tolerance_km: 1.25,
        }
    }
}

impl EnvConfig {
    pub fn with_scenario(mut self, scenario: Scenario, objective: Objective) -> Self {
        self.scenario = scenario;
        self.objective = objective;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |m: &str| Err(SimError::Config(m.to_string()));
        if !(0.0 < self.v_low && self.v_low < self.v_med && self.v_med < self.v_high) {
            return fail("speeds must satisfy 0 < v_low < v_med < v_high");
        }
        if self.dt_minutes == 0 || !self.horizon_minutes.is_multiple_of(self.dt_minutes) {
            return fail("dt must be positive and divide the horizon");
        }
        if !(self.delay_fraction > 0.0 && self.delay_fraction < 1.0) {
            return fail("delay_fraction must lie in (0, 1)");
        }
        if !(self.catchup_tolerance_km >= 0.0 && self.platoon_profit_per_km.is_finite()) {
            return fail("catch-up tolerance and platoon profit must be finite and non-negative");
        }
        Ok(())
    }

    pub fn horizon_steps(&self) -> u32 {
        self.horizon_minutes / self.dt_minutes
    }

    pub fn dt(&self) -> f64 {
        f64::from(self.dt_minutes)
    }

    /// Kilometres covered in one step at `speed_kmh`.
    pub fn step_km(&self, speed_kmh: f64) -> f64 {
        speed_kmh * self.dt() / 60.0
    }

    /// Minutes needed to drive `route_km` at the medium speed.
    pub fn medium_trip_minutes(&self, route_km: f64) -> f64 {
        60.0 * route_km / self.v_med
    }

    pub fn delay_cap_minutes(&self, route_km: f64) -> f64 {
        self.delay_fraction * self.medium_trip_minutes(route_km)
    }

    /// Delay added by one step at low speed, relative to medium speed.
    pub fn low_speed_penalty(&self) -> f64 {
        self.dt() * (self.v_med / self.v_low - 1.0)
    }

    /// Delay recovered by one step at high speed.
    pub fn high_speed_recovery(&self) -> f64 {
        self.dt() * (1.0 - self.v_med / self.v_high)
    }
}

/// Deadline step: departure plus the medium-speed trip time inflated by the delay cap.
pub fn derive_deadline(route_km: f64, start_step: u32, config: &EnvConfig) -> u32 {
    assert!(route_km > 0.0, "route length must be positive");
    let allowed = (1.0 + config.delay_fraction) * config.medium_trip_minutes(route_km);
    // Guard against 1.1 * x landing a hair above an exact integer step count.
    let steps = (allowed / config.dt() - 1e-9).ceil();
    start_step + steps as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = EnvConfig::default();
        c.validate().unwrap();
        assert_eq!(c.horizon_steps(), 200);
        assert_eq!(c.step_km(c.v_med), 6.25);
        assert_eq!(c.step_km(c.v_high), 7.5);
        assert_eq!(c.low_speed_penalty(), 1.25);
        assert!((c.high_speed_recovery() - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(c.catchup_tolerance_km, c.step_km(c.v_high) - c.step_km(c.v_med));
    }

    #[test]
    fn deadline_for_150_km() {
        let c = EnvConfig::default();
        assert_eq!(c.medium_trip_minutes(150.0), 120.0);
        assert!((c.delay_cap_minutes(150.0) - 12.0).abs() < 1e-12);
        assert_eq!(derive_deadline(150.0, 10, &c), 10 + 27);
    }

    #[test]
    fn deadline_for_75_km() {
        let c = EnvConfig::default();
        assert_eq!(c.medium_trip_minutes(75.0), 60.0);
        assert!((c.delay_cap_minutes(75.0) - 6.0).abs() < 1e-12);
        // 66 minutes / 5 = 13.2 -> 14 steps
        assert_eq!(derive_deadline(75.0, 0, &c), 14);
    }

    #[test]
    fn exact_step_multiple_is_not_rounded_up() {
        // 1.1 * 50 min = 55 min = exactly 11 steps
        let c = EnvConfig::default();
        assert_eq!(derive_deadline(62.5, 0, &c), 11);
    }

    #[test]
    #[should_panic]
    fn zero_length_route_is_rejected() {
        derive_deadline(0.0, 0, &EnvConfig::default());
    }

    #[test]
    fn invalid_speeds_rejected() {
        let c = EnvConfig {
            v_low: 80.0,
            ..EnvConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
