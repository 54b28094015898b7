use serde::{Deserialize, Serialize};

/// The three failure classes a generated reward program can fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DslErrorKind {
    /// Malformed text: unbalanced brackets, stray tokens, bad literals.
    Syntax,
    /// Well-formed but meaningless: unknown names, wrong arity, duplicate terms.
    Semantic,
    /// Fails while evaluating: division by zero, overflow, NaN.
    Runtime,
}

impl DslErrorKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Syntax => "SYNTAX",
            Self::Semantic => "SEMANTIC",
            Self::Runtime => "RUNTIME",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DslError {
    pub kind: DslErrorKind,
    pub message: String,
    /// 1-based line and column, when the error points at source text.
    pub location: Option<(usize, usize)>,
}

impl DslError {
    pub fn syntax(message: impl Into<String>, line: usize, column: usize) -> Self {
        Self {
            kind: DslErrorKind::Syntax,
            message: message.into(),
            location: Some((line, column)),
        }
    }

    pub fn semantic(message: impl Into<String>, location: Option<(usize, usize)>) -> Self {
        Self {
            kind: DslErrorKind::Semantic,
            message: message.into(),
            location,
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            kind: DslErrorKind::Runtime,
            message: message.into(),
            location: None,
        }
    }
}

impl std::fmt::Display for DslError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.message)?;
        if let (DslErrorKind::Syntax, Some((line, col))) = (self.kind, self.location) {
            write!(f, " at {line}:{col}")?;
        }
        Ok(())
    }
}

impl std::error::Error for DslError {}
