//! Name-resolved specification.
//!
//! Streams (inputs, outputs, triggers) are addressed by [`StreamId`], an
//! index in declaration order. Constants are inlined as [`ExprKind::Const`]
//! references. Every expression node carries an [`ExprId`] that keys the
//! type side tables built by later stages.

use crate::activation::Activation;
use crate::diagnostics::Span;
use crate::frontend::ast::{BinOp, InstanceSelection, Literal, UnOp};
use crate::time::Duration;
use crate::types::ValueType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Input,
    Output,
    Trigger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseKind {
    Spawn,
    Eval,
    Close,
}

impl ClauseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClauseKind::Spawn => "spawn",
            ClauseKind::Eval => "eval",
            ClauseKind::Close => "close",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spec {
    pub streams: Vec<Stream>,
    pub constants: Vec<Constant>,
    pub expr_count: usize,
}

#[derive(Clone, Debug)]
pub struct Constant {
    pub name: String,
    pub ty: ValueType,
    pub value: Literal,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Stream {
    pub id: StreamId,
    pub name: String,
    pub kind: StreamKind,
    pub params: Vec<String>,
    pub annotation: Option<ValueType>,
    pub spawn: Option<Clause>,
    /// Absent only for inputs.
    pub eval: Option<Clause>,
    pub close: Option<Clause>,
    pub span: Span,
}

impl Stream {
    pub fn is_input(&self) -> bool {
        self.kind == StreamKind::Input
    }

    pub fn is_parameterized(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn clause(&self, kind: ClauseKind) -> Option<&Clause> {
        match kind {
            ClauseKind::Spawn => self.spawn.as_ref(),
            ClauseKind::Eval => self.eval.as_ref(),
            ClauseKind::Close => self.close.as_ref(),
        }
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.spawn.iter().chain(self.eval.iter()).chain(self.close.iter())
    }
}

#[derive(Clone, Debug)]
pub struct Clause {
    pub kind: ClauseKind,
    pub pacing: Option<PacingAnnotation>,
    pub when: Option<Expr>,
    pub with: Option<Expr>,
    pub span: Span,
}

impl Clause {
    pub fn exprs(&self) -> impl Iterator<Item = &Expr> {
        self.when.iter().chain(self.with.iter())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PacingAnnotation {
    Event(Activation, Span),
    Periodic(Duration, Span),
}

impl PacingAnnotation {
    pub fn span(&self) -> Span {
        match self {
            PacingAnnotation::Event(_, s) | PacingAnnotation::Periodic(_, s) => *s,
        }
    }
}

/// A stream, possibly applied to instance arguments.
#[derive(Clone, Debug)]
pub struct StreamRef {
    pub stream: StreamId,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub id: ExprId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Lit(Literal),
    Const(ConstId),
    /// Parameter of the enclosing stream, by position.
    Param(usize),
    /// Synchronous access to the current value.
    Access(StreamRef),
    Offset(StreamRef, u32),
    Hold(StreamRef, Option<Box<Expr>>),
    Defaults(Box<Expr>, Box<Expr>),
    Window {
        target: StreamRef,
        duration: Duration,
        exact: bool,
        aggregation: String,
    },
    InstanceAggregate {
        stream: StreamId,
        selection: InstanceSelection,
        aggregation: String,
    },
    Call(String, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    Project(Box<Expr>, usize),
    Format(String, Vec<Expr>),
}

impl Expr {
    /// Direct sub-expressions, including instance arguments.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Lit(_) | ExprKind::Const(_) | ExprKind::Param(_) => Vec::new(),
            ExprKind::InstanceAggregate { .. } => Vec::new(),
            ExprKind::Access(r) | ExprKind::Offset(r, _) => r.args.iter().collect(),
            ExprKind::Window { target, .. } => target.args.iter().collect(),
            ExprKind::Hold(r, d) => r.args.iter().chain(d.iter().map(|b| &**b)).collect(),
            ExprKind::Defaults(a, b) | ExprKind::Binary(_, a, b) => vec![a, b],
            ExprKind::Unary(_, a) | ExprKind::Project(a, _) => vec![a],
            ExprKind::Call(_, args) | ExprKind::Tuple(args) | ExprKind::Format(_, args) => args.iter().collect(),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

impl Spec {
    pub fn stream(&self, id: StreamId) -> &Stream {
        &self.streams[id.0]
    }

    pub fn lookup(&self, name: &str) -> Option<StreamId> {
        self.streams.iter().find(|s| s.name == name).map(|s| s.id)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Stream> {
        self.streams.iter().filter(|s| s.is_input())
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Stream> {
        self.streams.iter().filter(|s| !s.is_input())
    }

    pub fn name(&self, id: StreamId) -> &str {
        &self.streams[id.0].name
    }
}
