use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{ChatMessage, Completion, LlmError, Provider};

/// Request-shape assertion for one scripted call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expectation {
    pub message_count: Option<usize>,
    /// Substrings that must occur in the last message.
    pub last_contains: Vec<String>,
}

impl Expectation {
    /// `messages=N` fixes the count; every other non-empty line must occur in the last message.
    pub fn parse(text: &str) -> Result<Self, LlmError> {
        let mut e = Self::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            match line.strip_prefix("messages=") {
                Some(n) => {
                    e.message_count = Some(
                        n.trim()
                            .parse()
                            .map_err(|_| LlmError::Config(format!("bad expectation line '{line}'")))?,
                    )
                }
                None => e.last_contains.push(line.to_string()),
            }
        }
        Ok(e)
    }

    fn check(&self, ordinal: u64, messages: &[ChatMessage]) -> Result<(), LlmError> {
        let fail = |m: String| Err(LlmError::Expectation { ordinal, message: m });
        if let Some(n) = self.message_count {
            if messages.len() != n {
                return fail(format!("expected {n} messages, got {}", messages.len()));
            }
        }
        let last = messages.last().map_or("", |m| m.content.as_str());
        for needle in &self.last_contains {
            if !last.contains(needle.as_str()) {
                return fail(format!("last message lacks '{needle}'"));
            }
        }
        Ok(())
    }
}

/// Replays fixture responses keyed by call ordinal.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    responses: BTreeMap<u64, String>,
    expectations: BTreeMap<u64, Expectation>,
    source: Option<PathBuf>,
}

impl MockProvider {
    pub fn from_responses<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        Self {
            responses: responses.into_iter().enumerate().map(|(i, r)| (i as u64, r.into())).collect(),
            ..Self::default()
        }
    }

    /// Reads `NNN.txt` responses and optional `NNN.expect.txt` assertions.
    pub fn from_dir(dir: &Path) -> Result<Self, LlmError> {
        let io = |e: std::io::Error| LlmError::Config(format!("mock script {}: {e}", dir.display()));
        let mut mock = Self {
            source: Some(dir.to_path_buf()),
            ..Self::default()
        };
        for entry in fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let (stem, is_expect) = match name.strip_suffix(".expect.txt") {
                Some(stem) => (stem, true),
                None => match name.strip_suffix(".txt") {
                    Some(stem) => (stem, false),
                    None => continue,
                },
            };
            let Ok(ordinal) = stem.parse::<u64>() else { continue };
            let text = fs::read_to_string(&path).map_err(io)?;
            if is_expect {
                mock.expectations.insert(ordinal, Expectation::parse(&text)?);
            } else {
                mock.responses.insert(ordinal, text);
            }
        }
        if mock.responses.is_empty() {
            return Err(LlmError::Config(format!("mock script {} has no responses", dir.display())));
        }
        Ok(mock)
    }

    pub fn expect(mut self, ordinal: u64, expectation: Expectation) -> Self {
        self.expectations.insert(ordinal, expectation);
        self
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl Provider for MockProvider {
    fn complete(&self, ordinal: u64, messages: &[ChatMessage], _temperature: f64) -> Result<Completion, LlmError> {
        if let Some(e) = self.expectations.get(&ordinal) {
            e.check(ordinal, messages)?;
        }
        let text = self.responses.get(&ordinal).ok_or_else(|| LlmError::MockExhausted {
            ordinal,
            available: self.responses.len(),
            source_dir: self.source.as_ref().map(|p| p.display().to_string()),
        })?;
        Ok(Completion {
            text: text.clone(),
            prompt_tokens: None,
            completion_tokens: None,
        })
    }

    fn describe(&self) -> String {
        match &self.source {
            Some(p) => format!("mock:{}", p.display()),
            None => "mock:inline".into(),
        }
    }
}
