use std::fmt::Write as _;

use super::ast::{Expr, ExprKind, RewardProgram, UnaryOp};

const COND: u8 = 1;
const NOT: u8 = 4;
const NEG: u8 = 8;
const ATOM: u8 = 9;

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Cond(..) => COND,
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::Unary(UnaryOp::Not, _) => NOT,
        ExprKind::Unary(UnaryOp::Neg, _) => NEG,
        _ => ATOM,
    }
}

/// Canonical source text: one term per line, minimal parentheses.
pub fn pretty_print(program: &RewardProgram) -> String {
    let mut out = String::new();
    for t in &program.terms {
        let _ = writeln!(out, "term {} weight {}: {}", t.name, t.weight, print_expr(&t.body));
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, COND);
    out
}

fn write_expr(out: &mut String, e: &Expr, min_level: u8) {
    let lvl = level(e);
    let wrap = lvl < min_level;
    if wrap {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Num(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Feature { name, .. } => out.push_str(name),
        ExprKind::Unary(UnaryOp::Neg, inner) => {
            out.push('-');
            write_expr(out, inner, NEG);
        }
        ExprKind::Unary(UnaryOp::Not, inner) => {
            out.push_str("not ");
            write_expr(out, inner, NOT);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            // Comparisons do not chain, so both sides bind tighter.
            let left_min = if p == 5 { p + 1 } else { p };
            write_expr(out, l, left_min);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, p + 1);
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, COND);
            }
            out.push(')');
        }
        ExprKind::Cond(c, t, f) => {
            write_expr(out, c, COND + 1);
            out.push_str(" ? ");
            write_expr(out, t, COND);
            out.push_str(" : ");
            write_expr(out, f, COND);
        }
    }
    if wrap {
        out.push(')');
    }
}
