//! Chat-completion providers: a live OpenAI-compatible client and a
//! fixture-replaying mock, behind a shared [`Gateway`].

mod config;
mod gateway;
mod message;
mod mock;
mod openai;

pub use config::ProviderConfig;
pub use gateway::{CallKind, Gateway, TranscriptEntry};
pub use message::{extract_program_blocks, ChatMessage, Role};
pub use mock::{Expectation, MockProvider};
pub use openai::OpenAiProvider;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

pub trait Provider: Send + Sync {
    fn complete(&self, ordinal: u64, messages: &[ChatMessage], temperature: f64) -> Result<Completion, LlmError>;

    fn describe(&self) -> String;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlmError {
    #[error("provider config: {0}")]
    Config(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("transport failed after {attempts} attempts: {last}")]
    Transport { attempts: u32, last: String },
    #[error("http {status}: {body}")]
    Http { status: u16, body: String },
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("mock script exhausted at call {ordinal} ({available} responses{})", source_dir.as_ref().map(|d| format!(" in {d}")).unwrap_or_default())]
    MockExhausted {
        ordinal: u64,
        available: usize,
        source_dir: Option<String>,
    },
    #[error("mock call {ordinal}: request shape mismatch: {message}")]
    Expectation { ordinal: u64, message: String },
}
