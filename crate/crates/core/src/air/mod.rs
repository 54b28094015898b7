//! Analysis-then-generation dialogue that yields the initial reward pool.
//!
//! The model first receives background knowledge and the environment brief,
//! answers four analysis questions in a fixed order, then writes `k`
//! programs. Each answer is appended to the chat buffer before the next turn.

mod admit;
pub mod prompts;

pub use admit::{admit_sources, AdmittedProgram, Rejection};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{FeatureCatalog, GRAMMAR_SUMMARY};
use crate::llm::{extract_program_blocks, CallKind, ChatMessage, Gateway, LlmError};
use crate::sim::{Objective, Scenario};
use prompts::{count_phrase, render};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AirError {
    #[error(transparent)]
    Gateway(#[from] LlmError),
    #[error("call {label}: response contains no rdsl block")]
    Extraction { label: String },
}

/// The textual objective given to the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskText {
    pub scenario: String,
    pub text: String,
}

impl TaskText {
    /// The built-in task text for a scenario and objective.
    pub fn standard(scenario: Scenario, objective: Objective) -> Self {
        let text = match (objective, scenario) {
            (Objective::SingleObject, Scenario::Wait) => "Without considering time, planning the waiting time at hubs to form platoons as many as possible to obtain profits.",
            (Objective::SingleObject, Scenario::Speed) => "Without considering time, adjusting the speed to form platoons as many as possible to obtain profits.",
            (Objective::SingleObject, Scenario::Mix) => "Without considering time, adjusting the speed and waiting time to form platoons as many as possible to obtain profits.",
            (Objective::MultiObject, Scenario::Wait) => "Planning the waiting time at hubs to form as many platoons as possible while reducing delay time.",
            (Objective::MultiObject, Scenario::Speed) => "Adjusting the speed to form as many platoons as possible while reducing delay time.",
            (Objective::MultiObject, Scenario::Mix) => "Adjusting the speed and waiting time to form as many platoons as possible while reducing delay time.",
        };
        Self {
            scenario: format!("{scenario:?}"),
            text: text.to_string(),
        }
    }

    pub fn custom(scenario: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            text: text.into(),
        }
    }
}

/// How the final turn asks for `k` programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GenerationMode {
    /// One call asking for all `k` programs.
    #[default]
    Batch,
    /// `k` calls, each asking for one program.
    PerProgram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTurn {
    pub label: String,
    pub content: String,
}

/// System message plus six user turns: background, four analysis
/// dimensions, generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisDialogue {
    pub system: String,
    pub turns: Vec<PromptTurn>,
    pub k: usize,
    pub mode: GenerationMode,
}

pub const ANALYSIS_DIMENSIONS: [&str; 4] = [
    "implementation details",
    "environmental architecture",
    "agent interactions",
    "task-relevant information",
];

fn feature_list() -> String {
    FeatureCatalog::entries()
        .iter()
        .map(|f| format!("- {} [{}]: {}", f.name, f.units, f.description))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Generation instruction asking for `n` programs.
pub fn generation_prompt(n: usize) -> String {
    render(
        prompts::GENERATION,
        &[
            ("count_phrase", &count_phrase(n)),
            ("grammar", GRAMMAR_SUMMARY),
            ("features", &feature_list()),
        ],
    )
}

/// Panics when `brief` is empty or `k` is zero.
pub fn build_analysis_dialogue(brief: &str, task: &TaskText, k: usize, mode: GenerationMode) -> AnalysisDialogue {
    assert!(!brief.trim().is_empty(), "environment brief must not be empty");
    assert!(k >= 1, "k must be at least 1");
    let task_vars = [("task", task.text.as_str())];
    let turn = |label: &str, content: String| PromptTurn {
        label: label.to_string(),
        content,
    };
    let per_call = match mode {
        GenerationMode::Batch => k,
        GenerationMode::PerProgram => 1,
    };
    AnalysisDialogue {
        system: render(prompts::SYSTEM, &[]),
        turns: vec![
            turn("background", render(prompts::BACKGROUND, &[("brief", brief.trim_end()), ("task", &task.text)])),
            turn("implementation", render(prompts::DIM_IMPLEMENTATION, &[])),
            turn("architecture", render(prompts::DIM_ARCHITECTURE, &[])),
            turn("interactions", render(prompts::DIM_INTERACTIONS, &[])),
            turn("task", render(prompts::DIM_TASK, &task_vars)),
            turn("generation", generation_prompt(per_call)),
        ],
        k,
        mode,
    }
}

impl AnalysisDialogue {
    /// The full dialogue as plain text, used for golden files.
    pub fn render_text(&self) -> String {
        let mut out = format!("[system]\n{}\n", self.system);
        for t in &self.turns {
            out.push_str(&format!("\n[user:{}]\n{}\n", t.label, t.content));
        }
        out
    }
}

/// Result of the initial generation.
#[derive(Debug, Clone)]
pub struct AirOutcome {
    pub candidates: Vec<AdmittedProgram>,
    /// Generation slot of each admitted candidate.
    pub slots: Vec<usize>,
    pub rejections: Vec<Rejection>,
    /// System message, every turn and every answer, in order.
    pub buffer: Vec<ChatMessage>,
    pub generation_calls: u32,
}

/// Runs the dialogue and admits up to `k` programs.
pub fn generate_initial(dialogue: &AnalysisDialogue, gateway: &Gateway) -> Result<AirOutcome, AirError> {
    let mut buffer = vec![ChatMessage::system(dialogue.system.clone())];
    let (analysis, generation) = dialogue.turns.split_at(dialogue.turns.len() - 1);
    for turn in analysis {
        buffer.push(ChatMessage::user(turn.content.clone()));
        let answer = gateway.complete(CallKind::Analysis, &format!("air/{}", turn.label), &buffer)?;
        buffer.push(ChatMessage::assistant(answer));
    }
    let gen_turn = &generation[0];
    let k = dialogue.k;
    let mut sources: Vec<Option<String>> = Vec::with_capacity(k);
    let mut calls = 0;
    let base = buffer.clone();
    match dialogue.mode {
        GenerationMode::Batch => {
            buffer.push(ChatMessage::user(gen_turn.content.clone()));
            let answer = gateway.complete(CallKind::Generation, "air/generation", &buffer)?;
            calls += 1;
            let blocks = extract_program_blocks(&answer);
            buffer.push(ChatMessage::assistant(answer));
            if blocks.is_empty() {
                return Err(AirError::Extraction {
                    label: "air/generation".into(),
                });
            }
            let mut blocks = blocks.into_iter();
            sources.extend((0..k).map(|_| blocks.next()));
        }
        GenerationMode::PerProgram => {
            for i in 0..k {
                let mut messages = base.clone();
                messages.push(ChatMessage::user(gen_turn.content.clone()));
                let label = format!("air/generation/{i}");
                let answer = gateway.complete(CallKind::Generation, &label, &messages)?;
                calls += 1;
                let block = extract_program_blocks(&answer).into_iter().next();
                if block.is_none() {
                    return Err(AirError::Extraction { label });
                }
                sources.push(block);
                if i == 0 {
                    buffer = messages;
                    buffer.push(ChatMessage::assistant(answer));
                }
            }
        }
    }
    let (admitted, rejections) = admit_sources(gateway, &buffer, &sources, "air")?;
    let slots = admitted.iter().map(|(slot, _)| *slot).collect();
    Ok(AirOutcome {
        slots,
        candidates: admitted.into_iter().map(|(_, a)| a).collect(),
        rejections,
        buffer,
        generation_calls: calls,
    })
}
