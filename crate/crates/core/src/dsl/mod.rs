//! Reward language: weighted named terms over simulator features.
//!
//! Programs are parsed, checked against the [`FeatureCatalog`], and evaluated
//! as a pure function of a [`FeatureMap`]. Failures fall into three kinds,
//! see [`DslErrorKind`].

mod ast;
mod catalog;
mod diff;
mod error;
mod eval;
mod lexer;
mod parser;
mod print;
mod validate;


pub use ast::{BinOp, Expr, ExprKind, RewardProgram, Term, UnaryOp};
pub use catalog::{probe_features, FeatureCatalog, FeatureInfo, FeatureMap, FEATURE_COUNT};
pub use diff::{structural_diff, EditSummary, Reweight};
pub use error::{DslError, DslErrorKind};
pub use eval::evaluate;
pub use parser::{parse, MAX_DEPTH};
pub use print::{pretty_print, print_expr};
pub use validate::{arity, validate, FUNCTIONS};

/// Grammar reference embedded in prompts and the environment brief.
pub const GRAMMAR_SUMMARY: &str = r#"program  = term+
term     = "term" NAME "weight" NUMBER ":" expr
expr     = cond ["?" expr ":" expr]
cond     = disjunction of "and"/"or"/"not" over comparisons
compare  = sum [("<" | "<=" | ">" | ">=" | "==" | "!=") sum]   (no chaining)
sum      = product {("+" | "-") product}
product  = unary {("*" | "/") unary}
unary    = "-" unary | NUMBER | FEATURE | CALL | "(" expr ")"
CALL     = min(a, b) | max(a, b) | abs(x) | clamp(x, lo, hi) | exp(x) | tanh(x)
Comparisons and boolean operators yield 1.0 or 0.0; any non-zero value is true.
Lines starting with # are comments. Term names must be unique.
The reward is the sum over terms of weight * body.
Division by zero or a non-finite intermediate value makes the program invalid."#;

impl RewardProgram {
    pub fn evaluate(&self, features: &FeatureMap) -> Result<f64, DslError> {
        eval::evaluate(self, features)
    }

    pub fn pretty(&self) -> String {
        print::pretty_print(self)
    }

    pub fn term_names(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.name.as_str()).collect()
    }
}

/// Parse then validate.
pub fn compile(text: &str) -> Result<RewardProgram, DslError> {
    let program = parse(text)?;
    validate(&program)?;
    Ok(program)
}

/// Outcome of checking one source text.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Valid(RewardProgram),
    Invalid(DslError),
}

impl Classification {
    pub fn kind(&self) -> Option<DslErrorKind> {
        match self {
            Self::Valid(_) => None,
            Self::Invalid(e) => Some(e.kind),
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind().map_or("VALID", DslErrorKind::label)
    }

    pub fn into_result(self) -> Result<RewardProgram, DslError> {
        match self {
            Self::Valid(p) => Ok(p),
            Self::Invalid(e) => Err(e),
        }
    }
}

/// Parse, validate, then evaluate on every probe feature map.
/// The first failing stage decides the class.
pub fn classify(text: &str) -> Classification {
    let program = match compile(text) {
        Ok(p) => p,
        Err(e) => return Classification::Invalid(e),
    };
    for probe in probe_features() {
        if let Err(e) = program.evaluate(&probe) {
            return Classification::Invalid(e);
        }
    }
    Classification::Valid(program)
}
