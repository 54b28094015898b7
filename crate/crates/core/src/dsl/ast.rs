use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Add => "+",
            Self::Sub => "-",
            Self::Mul => "*",
            Self::Div => "/",
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
            Self::Eq => "==",
            Self::Ne => "!=",
            Self::And => "and",
            Self::Or => "or",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            Self::Or => 2,
            Self::And => 3,
            Self::Lt | Self::Le | Self::Gt | Self::Ge | Self::Eq | Self::Ne => 5,
            Self::Add | Self::Sub => 6,
            Self::Mul | Self::Div => 7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ExprKind {
    Num(f64),
    /// `slot` caches the catalog index resolved at parse time.
    Feature { name: String, slot: Option<usize> },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl PartialEq for ExprKind {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (self, other) {
            (Num(a), Num(b)) => a == b,
            (Feature { name: a, .. }, Feature { name: b, .. }) => a == b,
            (Unary(o1, a), Unary(o2, b)) => o1 == o2 && a == b,
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1 == a2,
            (Cond(c1, t1, e1), Cond(c2, t2, e2)) => c1 == c2 && t1 == t2 && e1 == e2,
            _ => false,
        }
    }
}

/// Expression node; equality ignores source positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn depth(&self) -> usize {
        1 + match &self.kind {
            ExprKind::Num(_) | ExprKind::Feature { .. } => 0,
            ExprKind::Unary(_, e) => e.depth(),
            ExprKind::Binary(_, l, r) => l.depth().max(r.depth()),
            ExprKind::Call(_, args) => args.iter().map(Expr::depth).max().unwrap_or(0),
            ExprKind::Cond(c, t, e) => c.depth().max(t.depth()).max(e.depth()),
        }
    }

    /// Visits this node and every descendant, parents first.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Feature { .. } => {}
            ExprKind::Unary(_, e) => e.walk(visit),
            ExprKind::Binary(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(visit)),
            ExprKind::Cond(c, t, e) => {
                c.walk(visit);
                t.walk(visit);
                e.walk(visit);
            }
        }
    }
}

/// One weighted reward component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub weight: f64,
    pub body: Expr,
    pub line: usize,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.weight == other.weight && self.body == other.body
    }
}

/// A parsed reward program: an ordered list of weighted terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardProgram {
    pub terms: Vec<Term>,
    pub source: String,
}

/// Structural equality: term names, weights and bodies. Source text is ignored.
impl PartialEq for RewardProgram {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
