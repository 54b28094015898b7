//! Evolution step: asks the model to rework the current best program under
//! a fixed set of strategies, given its training feedback.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::air::prompts::{self, count_phrase, render};
use crate::air::{admit_sources, AirError, Rejection};
use crate::dsl::{pretty_print, structural_diff, EditSummary, RewardProgram};
use crate::filter::CurveStats;
use crate::llm::{extract_program_blocks, CallKind, ChatMessage, Gateway};
use crate::trainer::TrainingCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvolutionStrategy {
    /// Add one component, keep the rest.
    BranchAugment,
    /// Simplify components.
    PruneRefine,
    /// Change weights only.
    EquilibriumTune,
    /// Start over with a different idea.
    ParadigmLeap,
    /// Unconstrained "improve this" prompt, for ablations.
    GenericImprove,
}

impl EvolutionStrategy {
    pub const DEFAULT_SET: [EvolutionStrategy; 4] = [
        Self::BranchAugment,
        Self::PruneRefine,
        Self::EquilibriumTune,
        Self::ParadigmLeap,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Self::BranchAugment => "F1",
            Self::PruneRefine => "F2",
            Self::EquilibriumTune => "F3",
            Self::ParadigmLeap => "L1",
            Self::GenericImprove => "G",
        }
    }

    pub fn template(self) -> &'static str {
        match self {
            Self::BranchAugment => prompts::STRATEGY_F1,
            Self::PruneRefine => prompts::STRATEGY_F2,
            Self::EquilibriumTune => prompts::STRATEGY_F3,
            Self::ParadigmLeap => prompts::STRATEGY_L1,
            Self::GenericImprove => prompts::STRATEGY_GENERIC,
        }
    }

    pub fn prompt(self, m: usize) -> String {
        render(self.template(), &[("count_phrase", &count_phrase(m))])
    }
}

impl std::fmt::Display for EvolutionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {:?}", self.code(), self)
    }
}

impl std::str::FromStr for EvolutionStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            Self::BranchAugment,
            Self::PruneRefine,
            Self::EquilibriumTune,
            Self::ParadigmLeap,
            Self::GenericImprove,
        ];
        all.into_iter()
            .find(|x| x.code().eq_ignore_ascii_case(s) || format!("{x:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy '{s}'"))
    }
}

/// Four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..4).contains(&magnitude) {
        return format!("{x:.3e}");
    }
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Training feedback rendered as fixed-format text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackPacket {
    pub j_points: Vec<f64>,
    pub reward_points: Vec<f64>,
    pub text: String,
}

pub const FEEDBACK_STRIDE: usize = 5;

pub fn build_feedback(curve: &TrainingCurve, stats: &CurveStats) -> FeedbackPacket {
    let every = |xs: Vec<f64>| xs.into_iter().step_by(FEEDBACK_STRIDE).collect::<Vec<_>>();
    let j_points = every(curve.values());
    let reward_points = every(curve.step_rewards());
    let join = |xs: &[f64]| xs.iter().map(|x| sig4(*x)).collect::<Vec<_>>().join(", ");
    let flag = |b: bool| if b { "pass" } else { "fail" };
    let mut text = String::new();
    let _ = writeln!(text, "objective J (every {FEEDBACK_STRIDE}th evaluation): [{}]", join(&j_points));
    let _ = writeln!(text, "mean step reward (every {FEEDBACK_STRIDE}th evaluation): [{}]", join(&reward_points));
    let _ = writeln!(
        text,
        "early mean {} | late mean {} | early std {} | late std {} | slope sign {} | max J {}",
        sig4(stats.early_mean),
        sig4(stats.late_mean),
        sig4(stats.early_std),
        sig4(stats.late_std),
        stats.slope_sign,
        sig4(stats.max_value)
    );
    let _ = write!(
        text,
        "filter: mean {} | std {} | slope {}",
        flag(stats.pass_mean),
        flag(stats.pass_std),
        flag(stats.pass_slope)
    );
    FeedbackPacket {
        j_points,
        reward_points,
        text,
    }
}

/// The base buffer followed by one user message carrying the best program,
/// the feedback prompt and data, and the strategy prompt.
pub fn extend_buffer(
    base: &[ChatMessage],
    best: &RewardProgram,
    feedback: &FeedbackPacket,
    strategy: EvolutionStrategy,
    m: usize,
) -> Vec<ChatMessage> {
    let program = pretty_print(best);
    let head = render(prompts::FEEDBACK, &[("program", program.trim_end()), ("feedback", &feedback.text)]);
    let mut messages = base.to_vec();
    messages.push(ChatMessage::user(format!("{head}\n\n{}", strategy.prompt(m))));
    messages
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedCandidate {
    pub slot: usize,
    pub program: RewardProgram,
    pub source: String,
    pub repaired: bool,
    pub diff: EditSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub strategy: EvolutionStrategy,
    pub ordinal: u64,
    pub candidates: Vec<EvolvedCandidate>,
    pub rejections: Vec<Rejection>,
}

/// One generation call per strategy, issued concurrently (bounded by the
/// gateway's in-flight cap), then repairs in strategy order. Ordinals are
/// reserved up front in strategy order.
pub fn evolve(
    base: &[ChatMessage],
    best: &RewardProgram,
    feedback: &FeedbackPacket,
    strategies: &[EvolutionStrategy],
    m: usize,
    gateway: &Gateway,
) -> Result<Vec<StrategyOutcome>, AirError> {
    assert!(m >= 1, "m must be at least 1");
    let requests: Vec<(EvolutionStrategy, u64, Vec<ChatMessage>)> = strategies
        .iter()
        .map(|&s| (s, gateway.reserve(), extend_buffer(base, best, feedback, s, m)))
        .collect();
    let replies: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = requests
            .iter()
            .map(|(s, ordinal, messages)| {
                scope.spawn(move || {
                    gateway.complete_at(*ordinal, CallKind::Generation, &format!("evolve/{}", s.code()), messages)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("evolution thread")).collect()
    });

    let mut outcomes = Vec::with_capacity(strategies.len());
    for ((strategy, ordinal, mut messages), reply) in requests.into_iter().zip(replies) {
        let reply = reply?;
        let label = format!("evolve/{}", strategy.code());
        let mut blocks = extract_program_blocks(&reply).into_iter();
        let first = blocks.next().ok_or_else(|| AirError::Extraction { label: label.clone() })?;
        let sources: Vec<Option<String>> = std::iter::once(Some(first)).chain((1..m).map(|_| blocks.next())).collect();
        messages.push(ChatMessage::assistant(reply));
        let (admitted, rejections) = admit_sources(gateway, &messages, &sources, &label)?;
        outcomes.push(StrategyOutcome {
            strategy,
            ordinal,
            candidates: admitted
                .into_iter()
                .map(|(slot, a)| EvolvedCandidate {
                    slot,
                    diff: structural_diff(best, &a.program),
                    program: a.program,
                    source: a.source,
                    repaired: a.repaired,
                })
                .collect(),
            rejections,
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dsl::compile;
    use crate::filter::{curve_stats, FilterConfig};
    use crate::llm::MockProvider;
    use crate::trainer::CurvePoint;

    fn curve(f: impl Fn(usize) -> f64) -> TrainingCurve {
        TrainingCurve {
            points: (0..100)
                .map(|i| CurvePoint {
                    eval_index: i,
                    j: f(i),
                    mean_step_reward: f(i) / 100.0,
                })
                .collect(),
        }
    }

    fn packet(c: &TrainingCurve) -> FeedbackPacket {
        build_feedback(c, &curve_stats(&c.values(), &FilterConfig::default()).unwrap())
    }

    #[test]
    fn feedback_downsamples_every_fifth() {
        let p = packet(&curve(|i| i as f64));
        assert_eq!(p.j_points.len(), 20);
        assert_eq!(p.j_points[1], 5.0);
    }

    #[test]
    fn constant_curve_feedback() {
        let p = packet(&curve(|_| 7.0));
        assert!(p.text.contains("slope sign 0"));
        assert!(p.text.contains("slope fail"));
    }

    #[test]
    fn feedback_is_deterministic() {
        let c = curve(|i| (i as f64).sqrt() * 13.7);
        assert_eq!(packet(&c).text, packet(&c.clone()).text);
    }

    #[test]
    fn four_significant_digits() {
        assert_eq!(sig4(340.0), "340.0");
        assert_eq!(sig4(0.0123456), "0.01235");
        assert_eq!(sig4(-2.5), "-2.500");
        assert_eq!(sig4(123456.0), "1.235e5");
        assert_eq!(sig4(0.0), "0");
    }

    #[test]
    fn strategy_prompts_name_their_operation() {
        let checks = [
            (EvolutionStrategy::BranchAugment, "Add a new reward component"),
            (EvolutionStrategy::PruneRefine, "Simplify"),
            (EvolutionStrategy::EquilibriumTune, "Modify the weights"),
            (EvolutionStrategy::ParadigmLeap, "Create a new reward function"),
        ];
        for (s, needle) in checks {
            assert!(s.prompt(1).contains(needle), "{s}");
            assert!(s.prompt(1).contains("one reward function"));
        }
        assert_eq!("f3".parse::<EvolutionStrategy>().unwrap(), EvolutionStrategy::EquilibriumTune);
    }

    #[test]
    fn evolve_logs_diffs_and_keeps_input() {
        let best = compile("term p weight 1: in_platoon\nterm d weight -0.1: delay_minutes").unwrap();
        let snapshot = best.clone();
        let f1 = "```rdsl\nterm p weight 1: in_platoon\nterm d weight -0.1: delay_minutes\nterm k weight 0.01: step_platoon_km\n```";
        let f2 = "```rdsl\nterm p weight 1: in_platoon\n```";
        let f3 = "```rdsl\nterm p weight 2: in_platoon\nterm d weight -0.05: delay_minutes\n```";
        let l1 = "```rdsl\nterm share weight 1: shared_next_edge_count > 0\n```";
        let g = Gateway::new(Arc::new(MockProvider::from_responses([f1, f2, f3, l1])), 1.0, 4);
        let base = vec![ChatMessage::system("sys"), ChatMessage::user("hello"), ChatMessage::assistant("hi")];
        let fb = packet(&curve(|i| i as f64));
        let out = evolve(&base, &best, &fb, &EvolutionStrategy::DEFAULT_SET, 1, &g).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|o| o.candidates.len() == 1));
        assert_eq!(out[0].candidates[0].diff.counts(), (1, 0, 0, 0));
        assert_eq!(out[1].candidates[0].diff.counts(), (0, 1, 0, 0));
        let f3 = &out[2].candidates[0].diff;
        assert!(!f3.reweighted.is_empty() && f3.bodies_changed.is_empty());
        assert_eq!(out.iter().map(|o| o.ordinal).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(best, snapshot);
        let t = g.transcript();
        assert_eq!(t[0].request.len(), base.len() + 1);
        assert!(t[0].request[3].content.contains("Add a new reward component"));
        assert!(t[0].request[3].content.contains("objective J (every 5th evaluation)"));
    }
}
