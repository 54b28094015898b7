use serde::{Deserialize, Serialize};

use super::prompts::{render, REPAIR};
use crate::dsl::{compile, RewardProgram};
use crate::llm::{extract_program_blocks, CallKind, ChatMessage, Gateway, LlmError};

/// A program accepted into the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittedProgram {
    pub program: RewardProgram,
    /// Source text as returned by the model (after repair, if any).
    pub source: String,
    pub repaired: bool,
}

/// A program excluded from the pool, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub slot: usize,
    pub source: String,
    pub error: String,
    pub repair_attempted: bool,
}

/// Parses and validates each source. Every invalid one gets a single repair
/// call, in slot order, built from `buffer` plus the repair prompt.
/// Admitted programs keyed by their slot, plus the rejections.
pub type Admission = (Vec<(usize, AdmittedProgram)>, Vec<Rejection>);

pub fn admit_sources(
    gateway: &Gateway,
    buffer: &[ChatMessage],
    sources: &[Option<String>],
    label: &str,
) -> Result<Admission, LlmError> {
    let mut admitted = Vec::new();
    let mut rejected = Vec::new();
    for (slot, source) in sources.iter().enumerate() {
        let Some(source) = source else {
            rejected.push(Rejection {
                slot,
                source: String::new(),
                error: "response did not contain this program".into(),
                repair_attempted: false,
            });
            continue;
        };
        match compile(source) {
            Ok(program) => admitted.push((
                slot,
                AdmittedProgram {
                    program,
                    source: source.clone(),
                    repaired: false,
                },
            )),
            Err(first) => {
                let mut messages = buffer.to_vec();
                let error_text = first.to_string();
                messages.push(ChatMessage::user(render(
                    REPAIR,
                    &[("program", source.trim_end()), ("error", &error_text)],
                )));
                let reply = gateway.complete(CallKind::Repair, &format!("{label}/repair/{slot}"), &messages)?;
                let fixed = extract_program_blocks(&reply).into_iter().next();
                match fixed.as_deref().map(compile) {
                    Some(Ok(program)) => admitted.push((
                        slot,
                        AdmittedProgram {
                            program,
                            source: fixed.expect("checked above"),
                            repaired: true,
                        },
                    )),
                    Some(Err(e)) => rejected.push(Rejection {
                        slot,
                        source: source.clone(),
                        error: format!("{error_text}; after repair: {e}"),
                        repair_attempted: true,
                    }),
                    None => rejected.push(Rejection {
                        slot,
                        source: source.clone(),
                        error: format!("{error_text}; repair reply had no rdsl block"),
                        repair_attempted: true,
                    }),
                }
            }
        }
    }
    Ok((admitted, rejected))
}
