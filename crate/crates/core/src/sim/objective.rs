use serde::{Deserialize, Serialize};

use super::{EnvConfig, Objective, SimError};

/// Episode accumulators behind both objectives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTotals {
    /// Platoon kilometres summed over all member trucks.
    pub d_p: f64,
    /// Kilometres travelled by all trucks.
    pub d_total: f64,
    /// Accumulated delay minutes of all trucks.
    pub t_d: f64,
    /// Medium-speed trip minutes of all trucks.
    pub t_total: f64,
}

impl ObjectiveTotals {
    /// Platoon journey rate `D_p / D_total`.
    pub fn platoon_rate(&self) -> Option<f64> {
        (self.d_total > 0.0).then(|| self.d_p / self.d_total)
    }

    /// Delay rate `T_d / T_total`.
    pub fn delay_rate(&self) -> Option<f64> {
        (self.t_total > 0.0).then(|| self.t_d / self.t_total)
    }
}

/// `J = c_p * D_p` for the single objective, `J = P_j - T_r` for the multi objective.
pub fn compute_objective(totals: &ObjectiveTotals, config: &EnvConfig) -> Result<f64, SimError> {
    match config.objective {
        Objective::SingleObject => Ok(config.platoon_profit_per_km * totals.d_p),
        Objective::MultiObject => {
            let p_j = totals.platoon_rate().ok_or(SimError::DegenerateDenominator("D_total"))?;
            let t_r = totals.delay_rate().ok_or(SimError::DegenerateDenominator("T_total"))?;
            Ok(p_j - t_r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(objective: Objective) -> EnvConfig {
        EnvConfig {
            objective,
            ..EnvConfig::default()
        }
    }

    #[test]
    fn single_objective_scales_platoon_distance() {
        let t = ObjectiveTotals {
            d_p: 200.0,
            ..Default::default()
        };
        assert_eq!(compute_objective(&t, &cfg(Objective::SingleObject)).unwrap(), 340.0);
    }

    #[test]
    fn multi_objective_is_rate_difference() {
        let t = ObjectiveTotals {
            d_p: 300.0,
            d_total: 600.0,
            t_d: 30.0,
            t_total: 300.0,
        };
        let j = compute_objective(&t, &cfg(Objective::MultiObject)).unwrap();
        assert!((j - 0.4).abs() < 1e-12);
    }

    #[test]
    fn no_platoons_no_delay_is_zero() {
        let t = ObjectiveTotals {
            d_p: 0.0,
            d_total: 120.0,
            t_d: 0.0,
            t_total: 96.0,
        };
        assert_eq!(compute_objective(&t, &cfg(Objective::SingleObject)).unwrap(), 0.0);
        assert_eq!(compute_objective(&t, &cfg(Objective::MultiObject)).unwrap(), 0.0);
    }

    #[test]
    fn empty_scenario_is_degenerate() {
        let err = compute_objective(&ObjectiveTotals::default(), &cfg(Objective::MultiObject)).unwrap_err();
        assert!(matches!(err, SimError::DegenerateDenominator(_)));
    }
}
