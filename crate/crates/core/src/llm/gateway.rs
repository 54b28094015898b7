use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{ChatMessage, LlmError, Provider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CallKind {
    Analysis,
    Generation,
    Repair,
}

/// One gateway call as recorded in the transcript store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub ordinal: u64,
    pub kind: CallKind,
    pub label: String,
    pub request: Vec<ChatMessage>,
    pub response: Option<String>,
    pub error: Option<String>,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub timestamp: String,
}

/// Shared front end for a provider: ordinal allocation, an in-flight cap
/// and the transcript store. Safe to share across threads.
pub struct Gateway {
    provider: Arc<dyn Provider>,
    temperature: f64,
    next_ordinal: AtomicU64,
    in_flight: Mutex<usize>,
    slot_free: Condvar,
    max_in_flight: usize,
    transcript: Mutex<Vec<TranscriptEntry>>,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>, temperature: f64, max_in_flight: usize) -> Self {
        Self {
            provider,
            temperature,
            next_ordinal: AtomicU64::new(0),
            in_flight: Mutex::new(0),
            slot_free: Condvar::new(),
            max_in_flight: max_in_flight.max(1),
            transcript: Mutex::new(Vec::new()),
        }
    }

    pub fn describe(&self) -> String {
        self.provider.describe()
    }

    /// Reserves the next call ordinal. Reserving before dispatch keeps the
    /// ordinal of each call independent of thread scheduling.
    pub fn reserve(&self) -> u64 {
        self.next_ordinal.fetch_add(1, Ordering::SeqCst)
    }

    pub fn next_ordinal(&self) -> u64 {
        self.next_ordinal.load(Ordering::SeqCst)
    }

    /// Continues numbering from `ordinal`, used when resuming a run.
    pub fn set_next_ordinal(&self, ordinal: u64) {
        self.next_ordinal.store(ordinal, Ordering::SeqCst);
    }

    pub fn complete(&self, kind: CallKind, label: &str, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let ordinal = self.reserve();
        self.complete_at(ordinal, kind, label, messages)
    }

    pub fn complete_at(
        &self,
        ordinal: u64,
        kind: CallKind,
        label: &str,
        messages: &[ChatMessage],
    ) -> Result<String, LlmError> {
        if messages.is_empty() || messages.iter().any(|m| m.content.trim().is_empty()) {
            return Err(LlmError::Config("messages must be non-empty".into()));
        }
        {
            let mut n = self.in_flight.lock().expect("gateway lock");
            while *n >= self.max_in_flight {
                n = self.slot_free.wait(n).expect("gateway lock");
            }
            *n += 1;
        }
        let result = self.provider.complete(ordinal, messages, self.temperature);
        {
            *self.in_flight.lock().expect("gateway lock") -= 1;
            self.slot_free.notify_one();
        }
        let (response, error, pt, ct) = match &result {
            Ok(c) => (Some(c.text.clone()), None, c.prompt_tokens, c.completion_tokens),
            Err(e) => (None, Some(e.to_string()), None, None),
        };
        self.transcript.lock().expect("transcript lock").push(TranscriptEntry {
            ordinal,
            kind,
            label: label.to_string(),
            request: messages.to_vec(),
            response,
            error,
            prompt_tokens: pt,
            completion_tokens: ct,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        });
        result.map(|c| c.text)
    }

    /// Transcript entries sorted by ordinal.
    pub fn transcript(&self) -> Vec<TranscriptEntry> {
        let mut t = self.transcript.lock().expect("transcript lock").clone();
        t.sort_by_key(|e| e.ordinal);
        t
    }

    pub fn entries_since(&self, ordinal: u64) -> Vec<TranscriptEntry> {
        self.transcript().into_iter().filter(|e| e.ordinal >= ordinal).collect()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::AtomicUsize;
    use std::time::Duration;

    use super::*;
    use crate::llm::{Completion, MockProvider};

    #[test]
    fn ordinal_advances_and_transcript_records() {
        let g = Gateway::new(Arc::new(MockProvider::from_responses(["a", "b"])), 1.0, 4);
        assert_eq!(g.complete(CallKind::Analysis, "bg", &[ChatMessage::user("x")]).unwrap(), "a");
        assert_eq!(g.next_ordinal(), 1);
        assert_eq!(g.complete(CallKind::Generation, "gen", &[ChatMessage::user("y")]).unwrap(), "b");
        assert!(g.complete(CallKind::Repair, "r", &[ChatMessage::user("z")]).is_err());
        let t = g.transcript();
        assert_eq!(t.iter().map(|e| e.ordinal).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(t[2].error.as_deref().unwrap().contains("exhausted"));
    }

    struct Slow {
        now: AtomicUsize,
        peak: AtomicUsize,
    }

    impl Provider for Slow {
        fn complete(&self, ordinal: u64, _: &[ChatMessage], _: f64) -> Result<Completion, LlmError> {
            let n = self.now.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(n, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(20));
            self.now.fetch_sub(1, Ordering::SeqCst);
            Ok(Completion {
                text: ordinal.to_string(),
                prompt_tokens: None,
                completion_tokens: None,
            })
        }

        fn describe(&self) -> String {
            "slow".into()
        }
    }

    #[test]
    fn in_flight_cap_and_reserved_ordinals() {
        let slow = Arc::new(Slow {
            now: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let g = Gateway::new(slow.clone(), 1.0, 2);
        let ordinals: Vec<u64> = (0..6).map(|_| g.reserve()).collect();
        let answers: Vec<String> = std::thread::scope(|s| {
            let handles: Vec<_> = ordinals
                .iter()
                .map(|&o| {
                    let g = &g;
                    s.spawn(move || g.complete_at(o, CallKind::Generation, "x", &[ChatMessage::user("q")]).unwrap())
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(answers, vec!["0", "1", "2", "3", "4", "5"]);
        assert!(slow.peak.load(Ordering::SeqCst) <= 2);
        assert_eq!(g.transcript().len(), 6);
    }
}
