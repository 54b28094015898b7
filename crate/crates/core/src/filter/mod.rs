//! Convergence-and-performance filter over training curves.
//!
//! A curve passes when its late window beats its early window on average,
//! its late volatility is small relative to the early one, and its least
//! squares slope is positive. The best passing curve is the one with the
//! highest single value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("curve {index} has length {got}, expected {expected}")]
    LengthMismatch { index: usize, expected: usize, got: usize },
    #[error("no curves to filter")]
    EmptyInput,
    #[error("invalid filter config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Early window length.
    pub alpha: usize,
    /// Late window length.
    pub beta: usize,
    /// Volatility threshold on late std / early std.
    pub v_th: f64,
    /// Expected curve length.
    pub length: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            alpha: 20,
            beta: 40,
            v_th: 0.5,
            length: 100,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        if self.alpha == 0 || self.beta == 0 || self.alpha + self.beta > self.length {
            return Err(FilterError::Config(format!(
                "windows alpha={} beta={} do not fit a curve of length {}",
                self.alpha, self.beta, self.length
            )));
        }
        if self.length < 2 {
            return Err(FilterError::Config("curve length must be at least 2".into()));
        }
        if !(self.v_th > 0.0 && self.v_th.is_finite()) {
            return Err(FilterError::Config("v_th must be positive".into()));
        }
        Ok(())
    }

    fn check(&self, index: usize, curve: &[f64]) -> Result<(), FilterError> {
        self.validate()?;
        if curve.len() != self.length {
            return Err(FilterError::LengthMismatch {
                index,
                expected: self.length,
                got: curve.len(),
            });
        }
        Ok(())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Window statistics and predicate outcomes for one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub early_mean: f64,
    pub late_mean: f64,
    pub early_std: f64,
    pub late_std: f64,
    /// Sign of the least-squares slope over the whole curve: -1, 0 or 1.
    pub slope_sign: i8,
    pub max_value: f64,
    pub pass_mean: bool,
    pub pass_std: bool,
    pub pass_slope: bool,
    pub selected: bool,
    pub fallback: bool,
}

impl CurveStats {
    pub fn passes(&self) -> bool {
        self.pass_mean && self.pass_std && self.pass_slope
    }
}

fn early<'a>(curve: &'a [f64], c: &FilterConfig) -> &'a [f64] {
    &curve[..c.alpha]
}

fn late<'a>(curve: &'a [f64], c: &FilterConfig) -> &'a [f64] {
    &curve[curve.len() - c.beta..]
}

/// Early-window mean strictly below late-window mean.
pub fn f_mean(curve: &[f64], config: &FilterConfig) -> Result<bool, FilterError> {
    config.check(0, curve)?;
    Ok(mean(early(curve, config)) < mean(late(curve, config)))
}

/// Late std over early std below `v_th`. Both zero passes; only early zero fails.
pub fn f_std(curve: &[f64], config: &FilterConfig) -> Result<bool, FilterError> {
    config.check(0, curve)?;
    Ok(std_ratio_passes(std_dev(early(curve, config)), std_dev(late(curve, config)), config.v_th))
}

fn std_ratio_passes(early_std: f64, late_std: f64, v_th: f64) -> bool {
    if early_std == 0.0 {
        late_std == 0.0
    } else {
        late_std / early_std < v_th
    }
}

fn slope_sign(curve: &[f64]) -> i8 {
    let n = curve.len() as f64;
    let t_mean = (1..=curve.len()).map(|t| t as f64).sum::<f64>() / n;
    let j_mean = mean(curve);
    let cov = curve
        .iter()
        .enumerate()
        .map(|(i, j)| ((i + 1) as f64 - t_mean) * (j - j_mean))
        .sum::<f64>()
        / n;
    let var = (1..=curve.len()).map(|t| (t as f64 - t_mean).powi(2)).sum::<f64>() / n;
    let slope = cov / var;
    if slope > 0.0 {
        1
    } else if slope < 0.0 {
        -1
    } else {
        0
    }
}

/// Least-squares slope over t = 1..L strictly positive.
pub fn f_slope(curve: &[f64], config: &FilterConfig) -> Result<bool, FilterError> {
    config.check(0, curve)?;
    Ok(slope_sign(curve) > 0)
}

pub fn curve_stats(curve: &[f64], config: &FilterConfig) -> Result<CurveStats, FilterError> {
    config.check(0, curve)?;
    let (e, l) = (early(curve, config), late(curve, config));
    let (early_mean, late_mean, early_std, late_std) = (mean(e), mean(l), std_dev(e), std_dev(l));
    let sign = slope_sign(curve);
    Ok(CurveStats {
        early_mean,
        late_mean,
        early_std,
        late_std,
        slope_sign: sign,
        max_value: curve.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        pass_mean: early_mean < late_mean,
        pass_std: std_ratio_passes(early_std, late_std, config.v_th),
        pass_slope: sign > 0,
        selected: false,
        fallback: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub best_index: usize,
    pub best_curve: Vec<f64>,
    pub stats: Vec<CurveStats>,
    /// True when no curve passed all three predicates.
    pub fallback: bool,
}

impl Selection {
    pub fn passing(&self) -> Vec<usize> {
        self.stats.iter().enumerate().filter(|(_, s)| s.passes()).map(|(i, _)| i).collect()
    }

    /// One line per candidate.
    pub fn report(&self) -> String {
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        let mut out = String::new();
        for (i, s) in self.stats.iter().enumerate() {
            let _ = write!(
                out,
                "cand {i}: mean={} std={} slope={} early_mean={:.6} late_mean={:.6} early_std={:.6} late_std={:.6} slope_sign={:+} max={:.6}",
                flag(s.pass_mean),
                flag(s.pass_std),
                flag(s.pass_slope),
                s.early_mean,
                s.late_mean,
                s.early_std,
                s.late_std,
                s.slope_sign,
                s.max_value
            );
            if s.selected {
                out.push_str(if s.fallback { " <- selected (fallback)" } else { " <- selected" });
            }
            out.push('\n');
        }
        out
    }
}

fn argmax_first(values: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Keeps curves passing all three predicates and picks the one with the
/// highest maximum. Falls back to the highest late-window mean when none pass.
/// Ties go to the smallest index.
pub fn filter_and_select(curves: &[Vec<f64>], config: &FilterConfig) -> Result<Selection, FilterError> {
    if curves.is_empty() {
        return Err(FilterError::EmptyInput);
    }
    let mut stats = Vec::with_capacity(curves.len());
    for (i, c) in curves.iter().enumerate() {
        config.check(i, c)?;
        stats.push(curve_stats(c, config)?);
    }
    let passing = argmax_first(stats.iter().enumerate().filter(|(_, s)| s.passes()).map(|(i, s)| (i, s.max_value)));
    let (best_index, fallback) = match passing {
        Some(i) => (i, false),
        None => (
            argmax_first(stats.iter().enumerate().map(|(i, s)| (i, s.late_mean))).expect("non-empty"),
            true,
        ),
    };
    stats[best_index].selected = true;
    stats[best_index].fallback = fallback;
    Ok(Selection {
        best_index,
        best_curve: curves[best_index].clone(),
        stats,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Vec<f64> {
        (1..=100).map(|t| t as f64).collect()
    }

    fn ramp_plateau() -> Vec<f64> {
        (1..=100).map(|t| (t as f64).min(60.0)).collect()
    }

    // Population std of n consecutive integers: sqrt((n^2 - 1) / 12).
    fn consecutive_std(n: f64) -> f64 {
        ((n * n - 1.0) / 12.0).sqrt()
    }

    #[test]
    fn constant_curve() {
        let c = vec![5.0; 100];
        let cfg = FilterConfig::default();
        assert!(!f_mean(&c, &cfg).unwrap());
        assert!(!f_slope(&c, &cfg).unwrap());
        assert!(f_std(&c, &cfg).unwrap(), "both windows flat");
    }

    #[test]
    fn pure_line() {
        let cfg = FilterConfig::default();
        let s = curve_stats(&line(), &cfg).unwrap();
        assert!((s.early_mean - 10.5).abs() < 1e-9);
        assert!((s.late_mean - 80.5).abs() < 1e-9);
        assert!((s.early_std - consecutive_std(20.0)).abs() < 1e-9);
        assert!((s.late_std - consecutive_std(40.0)).abs() < 1e-9);
        assert!((s.late_std / s.early_std - 2.0).abs() < 0.01);
        assert!(s.pass_mean && s.pass_slope && !s.pass_std);
    }

    #[test]
    fn ramp_then_plateau_passes() {
        let s = curve_stats(&ramp_plateau(), &FilterConfig::default()).unwrap();
        assert_eq!(s.late_std, 0.0);
        assert!((s.early_std - 5.766281297335398).abs() < 1e-9);
        assert!(s.passes());
    }

    #[test]
    fn flat_early_noisy_late_fails_std() {
        let mut c = vec![1.0; 100];
        c[90] = 3.0;
        assert!(!f_std(&c, &FilterConfig::default()).unwrap());
    }

    #[test]
    fn decreasing_curve_fails() {
        let c: Vec<f64> = (1..=100).map(|t| -(t as f64)).collect();
        let cfg = FilterConfig::default();
        assert!(!f_mean(&c, &cfg).unwrap());
        assert!(!f_slope(&c, &cfg).unwrap());
    }

    #[test]
    fn selection_examples() {
        let cfg = FilterConfig::default();
        let scaled = |k: f64| ramp_plateau().iter().map(|v| v * k / 60.0).collect::<Vec<_>>();
        let sel = filter_and_select(&[scaled(10.0), scaled(12.0)], &cfg).unwrap();
        assert_eq!(sel.best_index, 1);
        assert!(!sel.fallback);

        let sel = filter_and_select(&[line(), ramp_plateau()], &cfg).unwrap();
        assert_eq!(sel.best_index, 1, "the higher-max line fails f_std");

        let down: Vec<f64> = (1..=100).map(|t| 100.0 - t as f64).collect();
        let sel = filter_and_select(&[down.clone(), vec![50.0; 100]], &cfg).unwrap();
        assert!(sel.fallback);
        assert_eq!(sel.best_index, 1, "late means 20.5 and 50");
        assert!(sel.stats[1].selected && sel.stats[1].fallback);
        assert!(sel.report().contains("<- selected (fallback)"));
    }

    #[test]
    fn ties_take_smallest_index() {
        let sel = filter_and_select(&[ramp_plateau(), ramp_plateau()], &FilterConfig::default()).unwrap();
        assert_eq!(sel.best_index, 0);
    }

    #[test]
    fn errors() {
        let cfg = FilterConfig::default();
        assert_eq!(filter_and_select(&[], &cfg), Err(FilterError::EmptyInput));
        assert_eq!(
            filter_and_select(&[line(), vec![1.0; 99]], &cfg),
            Err(FilterError::LengthMismatch {
                index: 1,
                expected: 100,
                got: 99
            })
        );
        let bad = FilterConfig {
            alpha: 70,
            ..cfg
        };
        assert!(matches!(f_mean(&line(), &bad), Err(FilterError::Config(_))));
    }
}
