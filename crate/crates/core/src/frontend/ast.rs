//! Syntax tree produced by the parser.
//!
//! Shorthands are already desugared here: `output o := e` and
//! `output o eval with e` produce identical declarations, and bare triggers
//! carry their condition and message in an eval clause.

use crate::diagnostics::Span;
use crate::time::Duration;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ast {
    pub imports: Vec<Ident>,
    pub declarations: Vec<Declaration>,
}

impl Ast {
    pub fn count(&self, kind: DeclKind) -> usize {
        self.declarations.iter().filter(|d| d.kind == kind).count()
    }

    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeclKind {
    Input,
    Constant,
    Output,
    Trigger,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub kind: DeclKind,
    /// Triggers get synthetic names `trigger_0`, `trigger_1`, ... in order.
    pub name: Ident,
    pub parameters: Vec<Ident>,
    pub ty: Option<TypeExpr>,
    pub spawn: Option<Clause>,
    pub eval: Option<Clause>,
    pub close: Option<Clause>,
    pub constant_value: Option<Literal>,
    pub span: Span,
}

/// One of the `spawn`, `eval` or `close` clauses.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub pacing: Option<PacingExpr>,
    pub when: Option<Expr>,
    /// eval: the stream value (a trigger's message); spawn: the parameter
    /// tuple; close: always absent.
    pub with: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeExpr {
    pub kind: TypeExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExprKind {
    Named(String),
    Tuple(Vec<TypeExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PacingExpr {
    Event(ActivationExpr),
    Periodic { period: Duration, span: Span },
}

impl PacingExpr {
    pub fn span(&self) -> Span {
        match self {
            PacingExpr::Event(a) => a.span(),
            PacingExpr::Periodic { span, .. } => *span,
        }
    }
}

/// Positive boolean formula over input names.
#[derive(Clone, Debug, PartialEq)]
pub enum ActivationExpr {
    True(Span),
    Stream(Ident),
    And(Box<ActivationExpr>, Box<ActivationExpr>),
    Or(Box<ActivationExpr>, Box<ActivationExpr>),
}

impl ActivationExpr {
    pub fn span(&self) -> Span {
        match self {
            ActivationExpr::True(s) => *s,
            ActivationExpr::Stream(i) => i.span,
            ActivationExpr::And(l, r) | ActivationExpr::Or(l, r) => l.span().to(r.span()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Int(u64),
    Float(f64),
    Bool(bool),
    Str(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
}

impl BinOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 5,
            BinOp::Pow => 6,
        }
    }

    pub fn right_assoc(self) -> bool {
        self == BinOp::Pow
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Pow => "**",
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstanceSelection {
    All,
    Fresh,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lit(Literal),
    Ident(String),
    /// `name(args)`: a function call or an instance application, decided
    /// during name resolution.
    Apply(Ident, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    Project(Box<Expr>, usize),
    /// `e.offset(by: -n)`, storing `n`.
    Offset(Box<Expr>, u32),
    Defaults(Box<Expr>, Box<Expr>),
    Hold(Box<Expr>, Option<Box<Expr>>),
    Window {
        target: Box<Expr>,
        duration: Duration,
        exact: bool,
        using: Ident,
    },
    InstanceAggregate {
        target: Box<Expr>,
        selection: InstanceSelection,
        using: Ident,
    },
    Format(Box<Expr>, Vec<Expr>),
}
