//! Recursive-descent parser for reward programs.
//!
//! ```text
//! program = term+
//! term    = "term" IDENT "weight" ["-"|"+"] NUMBER ":" expr
//! expr    = or ["?" expr ":" expr]
//! or      = and {"or" and}
//! and     = not {"and" not}
//! not     = "not" not | cmp
//! cmp     = add [("<"|"<="|">"|">="|"=="|"!=") add]
//! add     = mul {("+"|"-") mul}
//! mul     = unary {("*"|"/") unary}
//! unary   = "-" unary | atom
//! atom    = NUMBER | IDENT | IDENT "(" [expr {"," expr}] ")" | "(" expr ")"
//! ```

use super::ast::{BinOp, Expr, ExprKind, RewardProgram, Term, UnaryOp};
use super::lexer::{tokenize, Tok, Token};
use super::{DslError, FeatureCatalog};

/// Deepest expression tree the parser accepts.
pub const MAX_DEPTH: usize = 64;

// Each tree level costs up to eight parser frames (one per precedence level).
const RECURSION_LIMIT: usize = MAX_DEPTH * 10;

pub fn parse(text: &str) -> Result<RewardProgram, DslError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut terms = Vec::new();
    while p.peek() != &Tok::Eof {
        terms.push(p.term()?);
    }
    if terms.is_empty() {
        let t = p.current();
        return Err(DslError::syntax("program has no terms", t.line, t.column));
    }
    Ok(RewardProgram {
        terms,
        source: text.to_string(),
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn current(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, expected: &str) -> DslError {
        let t = self.current();
        DslError::syntax(
            format!("expected {expected}, found {}", t.tok.describe()),
            t.line,
            t.column,
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Token, DslError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error_here(expected))
        }
    }

    fn term(&mut self) -> Result<Term, DslError> {
        let head = self.expect(Tok::Term, "'term'")?;
        let name = match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                name
            }
            _ => return Err(self.error_here("term name")),
        };
        self.expect(Tok::Weight, "'weight'")?;
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        let weight = match *self.peek() {
            Tok::Num(n) => {
                self.bump();
                sign * n
            }
            _ => return Err(self.error_here("numeric weight")),
        };
        self.expect(Tok::Colon, "':' after weight")?;
        let body = self.expr(1)?;
        if !matches!(self.peek(), Tok::Term | Tok::Eof) {
            return Err(self.error_here("operator, 'term' or end of input"));
        }
        Ok(Term {
            name,
            weight,
            body,
            line: head.line,
        })
    }

    fn node(&self, kind: ExprKind, at: &Token, depth: usize) -> Result<Expr, DslError> {
        let e = Expr {
            kind,
            line: at.line,
            column: at.column,
        };
        debug_assert!(depth <= RECURSION_LIMIT);
        if e.depth() > MAX_DEPTH {
            return Err(DslError::syntax(
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                at.line,
                at.column,
            ));
        }
        Ok(e)
    }

    fn guard(&self, depth: usize) -> Result<(), DslError> {
        if depth > RECURSION_LIMIT {
            let t = self.current();
            return Err(DslError::syntax(
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                t.line,
                t.column,
            ));
        }
        Ok(())
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, DslError> {
        self.guard(depth)?;
        let start = self.current().clone();
        let cond = self.binary(2, depth)?;
        if *self.peek() != Tok::Question {
            return Ok(cond);
        }
        self.bump();
        let then = self.expr(depth + 1)?;
        self.expect(Tok::Colon, "':' in conditional")?;
        let otherwise = self.expr(depth + 1)?;
        self.node(
            ExprKind::Cond(Box::new(cond), Box::new(then), Box::new(otherwise)),
            &start,
            depth,
        )
    }

    fn binop_at(&self, level: u8) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Or => BinOp::Or,
            Tok::And => BinOp::And,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return None,
        };
        (op.precedence() == level).then_some(op)
    }

    /// Precedence climbing over levels 2 (or) to 7 (multiplicative); level 4 is prefix `not`.
    fn binary(&mut self, level: u8, depth: usize) -> Result<Expr, DslError> {
        self.guard(depth)?;
        match level {
            4 => return self.not(depth),
            8 => return self.unary(depth),
            _ => {}
        }
        let start = self.current().clone();
        let mut lhs = self.binary(level + 1, depth + 1)?;
        while let Some(op) = self.binop_at(level) {
            self.bump();
            let rhs = self.binary(level + 1, depth + 1)?;
            lhs = self.node(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), &start, depth)?;
            if level == 5 {
                if self.binop_at(5).is_some() {
                    return Err(self.error_here("no chained comparison; add parentheses"));
                }
                break;
            }
        }
        Ok(lhs)
    }

    fn not(&mut self, depth: usize) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Not {
            let at = self.bump();
            let inner = self.not(depth + 1)?;
            return self.node(ExprKind::Unary(UnaryOp::Not, Box::new(inner)), &at, depth);
        }
        self.binary(5, depth + 1)
    }

    fn unary(&mut self, depth: usize) -> Result<Expr, DslError> {
        self.guard(depth)?;
        if *self.peek() == Tok::Minus {
            let at = self.bump();
            let inner = self.unary(depth + 1)?;
            return self.node(ExprKind::Unary(UnaryOp::Neg, Box::new(inner)), &at, depth);
        }
        self.atom(depth)
    }

    fn atom(&mut self, depth: usize) -> Result<Expr, DslError> {
        let at = self.current().clone();
        match at.tok.clone() {
            Tok::Num(n) => {
                self.bump();
                self.node(ExprKind::Num(n), &at, depth)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    let slot = FeatureCatalog::index_of(&name);
                    return self.node(ExprKind::Feature { name, slot }, &at, depth);
                }
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.expr(depth + 1)?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "')' to close the argument list")?;
                self.node(ExprKind::Call(name, args), &at, depth)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr(depth + 1)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.error_here("number, feature, call or '('")),
        }
    }
}
