use serde::{Deserialize, Serialize};

use super::LlmError;

/// Live endpoint settings. The credential itself is read from the named
/// environment variable at client construction and never stored here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    /// Base URL; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout_seconds: u64,
    pub max_attempts: u32,
    pub backoff_base_ms: u64,
    pub api_key_env: String,
    /// Upper bound on concurrent calls through one gateway.
    pub max_in_flight: usize,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4o".into(),
            temperature: 1.0,
            max_output_tokens: 4096,
            timeout_seconds: 120,
            max_attempts: 4,
            backoff_base_ms: 500,
            api_key_env: "PCRD_API_KEY".into(),
            max_in_flight: 4,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.max_attempts == 0 {
            return Err(LlmError::Config("max_attempts must be at least 1".into()));
        }
        if self.timeout_seconds == 0 {
            return Err(LlmError::Config("timeout_seconds must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(LlmError::Config("max_in_flight must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Config("temperature must lie in [0, 2]".into()));
        }
        Ok(())
    }
}
