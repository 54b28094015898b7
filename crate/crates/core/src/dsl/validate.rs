use std::collections::BTreeSet;

use super::ast::{ExprKind, RewardProgram};
use super::{DslError, FeatureCatalog};

/// Built-in functions and their arities.
pub const FUNCTIONS: [(&str, usize); 6] = [
    ("min", 2),
    ("max", 2),
    ("abs", 1),
    ("clamp", 3),
    ("exp", 1),
    ("tanh", 1),
];

pub fn arity(name: &str) -> Option<usize> {
    FUNCTIONS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

/// Semantic checks: catalog membership, call arity, unique term names, finite numbers.
pub fn validate(program: &RewardProgram) -> Result<(), DslError> {
    let mut names = BTreeSet::new();
    for term in &program.terms {
        if !names.insert(term.name.as_str()) {
            return Err(DslError::semantic(
                format!("duplicate term name '{}'", term.name),
                Some((term.line, 1)),
            ));
        }
        if !term.weight.is_finite() {
            return Err(DslError::semantic(
                format!("weight of term '{}' is not finite", term.name),
                Some((term.line, 1)),
            ));
        }
        let mut problem = None;
        term.body.walk(&mut |e| {
            if problem.is_some() {
                return;
            }
            let at = Some((e.line, e.column));
            problem = match &e.kind {
                ExprKind::Feature { name, .. } if !FeatureCatalog::contains(name) => Some(
                    DslError::semantic(format!("unknown identifier '{name}'"), at),
                ),
                ExprKind::Call(name, args) => match arity(name) {
                    None => Some(DslError::semantic(format!("unknown function '{name}'"), at)),
                    Some(n) if n != args.len() => Some(DslError::semantic(
                        format!("function '{name}' expects {n} argument{}, found {}", if n == 1 { "" } else { "s" }, args.len()),
                        at,
                    )),
                    _ => None,
                },
                ExprKind::Num(v) if !v.is_finite() => {
                    Some(DslError::semantic("numeric literal is not finite", at))
                }
                _ => None,
            };
        });
        if let Some(err) = problem {
            return Err(err);
        }
    }
    Ok(())
}
