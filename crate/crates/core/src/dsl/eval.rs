use super::ast::{BinOp, Expr, ExprKind, RewardProgram, UnaryOp};
use super::{DslError, FeatureMap};

fn truthy(x: f64) -> bool {
    x != 0.0
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn finite(x: f64, what: &str) -> Result<f64, DslError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(DslError::runtime(format!("{what} produced a non-finite value")))
    }
}

/// Weighted sum of all term values. Conditionals and `and`/`or` short-circuit.
pub fn evaluate(program: &RewardProgram, features: &FeatureMap) -> Result<f64, DslError> {
    let mut total = 0.0;
    for term in &program.terms {
        let v = eval_expr(&term.body, features).map_err(|e| DslError {
            message: format!("term '{}': {}", term.name, e.message),
            ..e
        })?;
        total += term.weight * v;
        finite(total, "weighted sum")?;
    }
    Ok(total)
}

pub fn eval_expr(expr: &Expr, f: &FeatureMap) -> Result<f64, DslError> {
    let v = match &expr.kind {
        ExprKind::Num(v) => *v,
        ExprKind::Feature { name, slot } => match slot {
            Some(i) => f.at(*i),
            None => f
                .get(name)
                .ok_or_else(|| DslError::runtime(format!("feature '{name}' is not available")))?,
        },
        ExprKind::Unary(UnaryOp::Neg, e) => -eval_expr(e, f)?,
        ExprKind::Unary(UnaryOp::Not, e) => flag(!truthy(eval_expr(e, f)?)),
        ExprKind::Binary(BinOp::And, l, r) => flag(truthy(eval_expr(l, f)?) && truthy(eval_expr(r, f)?)),
        ExprKind::Binary(BinOp::Or, l, r) => flag(truthy(eval_expr(l, f)?) || truthy(eval_expr(r, f)?)),
        ExprKind::Binary(op, l, r) => {
            let (a, b) = (eval_expr(l, f)?, eval_expr(r, f)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(DslError::runtime("division by zero"));
                    }
                    a / b
                }
                BinOp::Lt => flag(a < b),
                BinOp::Le => flag(a <= b),
                BinOp::Gt => flag(a > b),
                BinOp::Ge => flag(a >= b),
                BinOp::Eq => flag(a == b),
                BinOp::Ne => flag(a != b),
                BinOp::And | BinOp::Or => unreachable!("handled above"),
            }
        }
        ExprKind::Call(name, args) => {
            let vals = args.iter().map(|a| eval_expr(a, f)).collect::<Result<Vec<_>, _>>()?;
            match (name.as_str(), vals.as_slice()) {
                ("min", [a, b]) => a.min(*b),
                ("max", [a, b]) => a.max(*b),
                ("abs", [a]) => a.abs(),
                ("exp", [a]) => a.exp(),
                ("tanh", [a]) => a.tanh(),
                ("clamp", [x, lo, hi]) => {
                    if lo > hi {
                        return Err(DslError::runtime("clamp lower bound exceeds upper bound"));
                    }
                    x.max(*lo).min(*hi)
                }
                _ => {
                    return Err(DslError::runtime(format!(
                        "call to '{name}' with {} arguments",
                        vals.len()
                    )))
                }
            }
        }
        ExprKind::Cond(c, t, e) => {
            if truthy(eval_expr(c, f)?) {
                eval_expr(t, f)?
            } else {
                eval_expr(e, f)?
            }
        }
    };
    finite(v, "expression")
}
