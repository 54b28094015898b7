use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::TrainError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub eval_index: usize,
    pub j: f64,
    /// Mean per-truck step reward over the training episodes since the previous point.
    pub mean_step_reward: f64,
}

/// Periodic greedy evaluations collected during one training run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingCurve {
    pub points: Vec<CurvePoint>,
}

pub const CURVE_CSV_HEADER: &str = "eval_index,J,mean_step_reward";

impl TrainingCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.j).collect()
    }

    pub fn step_rewards(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_step_reward).collect()
    }

    /// Values are written with `{:?}` so they parse back bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CURVE_CSV_HEADER}\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{:?},{:?}", p.eval_index, p.j, p.mean_step_reward);
        }
        out
    }

    /// Reads the form written by [`to_csv`](Self::to_csv) or the two-column
    /// `eval_index,J` form, whose step rewards read as zero.
    pub fn from_csv(text: &str) -> Result<Self, TrainError> {
        let mut lines = text.lines();
        let width = match lines.next().map(str::trim) {
            Some(CURVE_CSV_HEADER) => 3,
            Some("eval_index,J") => 2,
            _ => {
                return Err(TrainError::Format(format!(
                    "curve csv must start with '{CURVE_CSV_HEADER}' or 'eval_index,J'"
                )))
            }
        };
        let mut points = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || TrainError::Format(format!("curve csv line {}: malformed row", i + 2));
            let cols: Vec<&str> = line.trim().split(',').collect();
            if cols.len() != width {
                return Err(bad());
            }
            points.push(CurvePoint {
                eval_index: cols[0].parse().map_err(|_| bad())?,
                j: cols[1].parse().map_err(|_| bad())?,
                mean_step_reward: if width == 3 { cols[2].parse().map_err(|_| bad())? } else { 0.0 },
            });
        }
        Ok(Self { points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let curve = TrainingCurve {
            points: (0..5)
                .map(|i| CurvePoint {
                    eval_index: i,
                    j: 0.1 * i as f64 + 1.0 / 3.0,
                    mean_step_reward: -(i as f64) / 7.0,
                })
                .collect(),
        };
        let csv = curve.to_csv();
        assert!(csv.starts_with("eval_index,J,mean_step_reward\n"));
        assert_eq!(TrainingCurve::from_csv(&csv).unwrap(), curve);
    }

    #[test]
    fn two_column_form() {
        let c = TrainingCurve::from_csv("eval_index,J\n0,1.5\n1,2\n").unwrap();
        assert_eq!(c.values(), vec![1.5, 2.0]);
        assert!(TrainingCurve::from_csv("eval_index,J\n0,1.5,3\n").is_err());
        assert!(TrainingCurve::from_csv("x,y\n").is_err());
    }

    #[test]
    fn rejects_missing_header() {
        assert!(TrainingCurve::from_csv("0,1,2\n").is_err());
        assert!(TrainingCurve::from_csv("eval_index,J,mean_step_reward\n0,x,2\n").is_err());
    }
}
