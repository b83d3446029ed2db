//! Value-type inference by unification.
//!
//! Optionality is structural: only offsets, `hold()` and some aggregations
//! produce optional values, and a type variable is never bound to an
//! optional type. That keeps the "must be defaulted" check local.

use std::fmt;

use crate::diagnostics::{Code, Diagnostic, Span};
use crate::frontend::ast::{BinOp, Literal, UnOp};
use crate::ir::{Expr, ExprKind, Spec, StreamKind, StreamRef};
use crate::registry::{self, AggSignature, BuiltinSignature};

use super::ValueType;

/// Inferred types for every expression node, stream and parameter.
#[derive(Clone, Debug)]
pub struct ValueTypes {
    pub exprs: Vec<ValueType>,
    pub streams: Vec<ValueType>,
    pub params: Vec<Vec<ValueType>>,
}

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Var(usize),
    Int,
    UInt,
    Float,
    Bool,
    Str,
    Tuple(Vec<Ty>),
    Opt(Box<Ty>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarKind {
    Any,
    Numeric,
    Integral,
}

impl VarKind {
    fn meet(self, other: VarKind) -> VarKind {
        match (self, other) {
            (VarKind::Integral, _) | (_, VarKind::Integral) => VarKind::Integral,
            (VarKind::Numeric, _) | (_, VarKind::Numeric) => VarKind::Numeric,
            _ => VarKind::Any,
        }
    }

    fn admits(self, t: &Ty) -> bool {
        match self {
            VarKind::Any => true,
            VarKind::Numeric => matches!(t, Ty::Int | Ty::UInt | Ty::Float),
            VarKind::Integral => matches!(t, Ty::Int | Ty::UInt),
        }
    }
}

impl Ty {
    fn from_value_type(t: &ValueType) -> Ty {
        match t {
            ValueType::Int => Ty::Int,
            ValueType::UInt => Ty::UInt,
            ValueType::Float => Ty::Float,
            ValueType::Bool => Ty::Bool,
            ValueType::String => Ty::Str,
            ValueType::Tuple(e) => Ty::Tuple(e.iter().map(Ty::from_value_type).collect()),
            ValueType::Optional(i) => Ty::Opt(Box::new(Ty::from_value_type(i))),
        }
    }
}

struct Shown<'a>(&'a Solver, Ty);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.resolve(&self.1) {
            Ty::Var(v) => f.write_str(match self.0.kind[self.0.find(v)] {
                VarKind::Any => "_",
                VarKind::Numeric => "{number}",
                VarKind::Integral => "{integer}",
            }),
            Ty::Int => f.write_str("Int"),
            Ty::UInt => f.write_str("UInt"),
            Ty::Float => f.write_str("Float"),
            Ty::Bool => f.write_str("Bool"),
            Ty::Str => f.write_str("String"),
            Ty::Tuple(elems) => {
                f.write_str("(")?;
                for (i, e) in elems.into_iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Shown(self.0, e))?;
                }
                f.write_str(")")
            }
            Ty::Opt(i) => write!(f, "{}?", Shown(self.0, *i)),
        }
    }
}

#[derive(Default)]
struct Solver {
    parent: Vec<usize>,
    kind: Vec<VarKind>,
    binding: Vec<Option<Ty>>,
}

impl Solver {
    fn fresh(&mut self, kind: VarKind) -> Ty {
        let v = self.parent.len();
        self.parent.push(v);
        self.kind.push(kind);
        self.binding.push(None);
        Ty::Var(v)
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    /// Follows bindings at the top level only.
    fn resolve(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Var(v) = t {
            let r = self.find(v);
            match &self.binding[r] {
                Some(b) => t = b.clone(),
                None => return Ty::Var(r),
            }
        }
        t
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => w == v,
            Ty::Tuple(e) => e.iter().any(|x| self.occurs(v, x)),
            Ty::Opt(i) => self.occurs(v, &i),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), ()> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) => {
                if x != y {
                    let k = self.kind[*x].meet(self.kind[*y]);
                    self.parent[*x] = *y;
                    self.kind[*y] = k;
                }
                Ok(())
            }
            (Ty::Var(v), t) | (t, Ty::Var(v)) => {
                if matches!(t, Ty::Opt(_)) || self.occurs(*v, t) || !self.kind[*v].admits(t) {
                    return Err(());
                }
                self.binding[*v] = Some(t.clone());
                Ok(())
            }
            (Ty::Tuple(x), Ty::Tuple(y)) if x.len() == y.len() => {
                for (p, q) in x.iter().zip(y) {
                    self.unify(p, q)?;
                }
                Ok(())
            }
            (Ty::Opt(x), Ty::Opt(y)) => self.unify(x, y),
            _ if a == b => Ok(()),
            _ => Err(()),
        }
    }

    fn require_numeric(&mut self, t: &Ty) -> Result<(), ()> {
        match self.resolve(t) {
            Ty::Var(v) => {
                self.kind[v] = self.kind[v].meet(VarKind::Numeric);
                Ok(())
            }
            Ty::Int | Ty::UInt | Ty::Float => Ok(()),
            _ => Err(()),
        }
    }

    /// Fully resolved type; leftover integer variables default to Int.
    fn zonk(&self, t: &Ty) -> Option<ValueType> {
        Some(match self.resolve(t) {
            Ty::Var(v) => match self.kind[v] {
                VarKind::Any => return None,
                _ => ValueType::Int,
            },
            Ty::Int => ValueType::Int,
            Ty::UInt => ValueType::UInt,
            Ty::Float => ValueType::Float,
            Ty::Bool => ValueType::Bool,
            Ty::Str => ValueType::String,
            Ty::Tuple(e) => ValueType::Tuple(e.iter().map(|x| self.zonk(x)).collect::<Option<_>>()?),
            Ty::Opt(i) => ValueType::optional(self.zonk(&i)?),
        })
    }
}

struct Projection {
    tuple: Ty,
    index: usize,
    result: Ty,
    span: Span,
}

struct Infer<'a> {
    spec: &'a Spec,
    s: Solver,
    exprs: Vec<Option<Ty>>,
    streams: Vec<Ty>,
    params: Vec<Vec<Ty>>,
    projections: Vec<Projection>,
    int_literals: Vec<(usize, u64, Span)>,
    diags: Vec<Diagnostic>,
    current: usize,
}

pub fn infer_value_types(spec: &Spec) -> Result<ValueTypes, Vec<Diagnostic>> {
    let mut inf = Infer {
        spec,
        s: Solver::default(),
        exprs: vec![None; spec.expr_count],
        streams: Vec::new(),
        params: Vec::new(),
        projections: Vec::new(),
        int_literals: Vec::new(),
        diags: Vec::new(),
        current: 0,
    };
    for st in &spec.streams {
        let t = match (&st.annotation, st.kind) {
            (Some(a), _) => Ty::from_value_type(a),
            (None, StreamKind::Trigger) => Ty::Bool,
            (None, _) => inf.s.fresh(VarKind::Any),
        };
        inf.streams.push(t);
        let ps = st.params.iter().map(|_| inf.s.fresh(VarKind::Any)).collect();
        inf.params.push(ps);
    }
    for c in &spec.constants {
        let ok = matches!(
            (&c.value, &c.ty),
            (Literal::Int(n), ValueType::Int) if *n <= i64::MAX as u64
        ) || matches!(
            (&c.value, &c.ty),
            (Literal::Int(_), ValueType::UInt)
                | (Literal::Float(_), ValueType::Float)
                | (Literal::Bool(_), ValueType::Bool)
                | (Literal::Str(_), ValueType::String)
        );
        if !ok {
            inf.diags.push(Diagnostic::error(
                Code::TypeMismatch,
                c.span,
                format!("the value of constant `{}` does not fit its declared type {}", c.name, c.ty),
            ));
        }
    }
    for st in &spec.streams {
        inf.current = st.id.0;
        inf.stream(st);
    }
    inf.solve_projections();
    inf.finish()
}

impl Infer<'_> {
    fn mismatch(&mut self, span: Span, expected: &Ty, found: &Ty) {
        let msg = format!(
            "type mismatch: expected {}, found {}",
            Shown(&self.s, expected.clone()),
            Shown(&self.s, found.clone())
        );
        self.diags.push(Diagnostic::error(Code::TypeMismatch, span, msg));
    }

    fn expect(&mut self, e: &Expr, expected: &Ty) {
        let t = self.plain(e);
        if self.s.unify(&t, expected).is_err() {
            self.mismatch(e.span, expected, &t);
        }
    }

    fn stream(&mut self, st: &crate::ir::Stream) {
        let sid = st.id.0;
        if let Some(sp) = &st.spawn {
            if let Some(w) = &sp.when {
                self.expect(w, &Ty::Bool);
            }
            if let Some(w) = &sp.with {
                let ps = self.params[sid].clone();
                let target = if ps.len() == 1 { ps[0].clone() } else { Ty::Tuple(ps) };
                self.expect(w, &target);
            }
        }
        if let Some(ev) = &st.eval {
            if let Some(w) = &ev.when {
                if st.kind == StreamKind::Trigger {
                    let t = self.plain(w);
                    if self.s.unify(&t, &Ty::Bool).is_err() {
                        let msg = format!("trigger condition must be Bool, found {}", Shown(&self.s, t));
                        self.diags.push(Diagnostic::error(Code::TriggerNotBool, w.span, msg));
                    }
                } else {
                    self.expect(w, &Ty::Bool);
                }
            }
            if let Some(w) = &ev.with {
                if st.kind == StreamKind::Trigger {
                    self.expect(w, &Ty::Str);
                } else {
                    let target = self.streams[sid].clone();
                    self.expect(w, &target);
                }
            }
        }
        if let Some(cl) = &st.close {
            if let Some(w) = &cl.when {
                self.expect(w, &Ty::Bool);
            }
        }
    }

    /// Infers a type that must not be optional.
    fn plain(&mut self, e: &Expr) -> Ty {
        let t = self.infer(e);
        match self.s.resolve(&t) {
            Ty::Opt(inner) => {
                self.diags.push(Diagnostic::error(
                    Code::UndefaultedOptional,
                    e.span,
                    format!(
                        "this value of type {} may be absent; add `.defaults(to: ...)` or use `hold(or: ...)`",
                        Shown(&self.s, t.clone())
                    ),
                ));
                *inner
            }
            _ => t,
        }
    }

    fn stream_ref(&mut self, r: &StreamRef) -> Ty {
        let ps = self.params[r.stream.0].clone();
        for (a, p) in r.args.iter().zip(ps) {
            self.expect(a, &p);
        }
        self.streams[r.stream.0].clone()
    }

    fn aggregate(&mut self, name: &str, input: Ty, span: Span) -> (Ty, bool) {
        let agg = registry::aggregations().get(name).expect("resolved aggregation");
        let out = match agg.signature() {
            AggSignature::AnyTo(t) => Ty::from_value_type(&t),
            AggSignature::NumericSame => {
                if self.s.require_numeric(&input).is_err() {
                    self.diags.push(Diagnostic::error(
                        Code::TypeMismatch,
                        span,
                        format!("`{name}` aggregates numbers, found {}", Shown(&self.s, input.clone())),
                    ));
                }
                input
            }
            AggSignature::NumericToFloat => {
                if self.s.require_numeric(&input).is_err() {
                    self.diags.push(Diagnostic::error(
                        Code::TypeMismatch,
                        span,
                        format!("`{name}` aggregates numbers, found {}", Shown(&self.s, input.clone())),
                    ));
                }
                Ty::Float
            }
            AggSignature::BoolSame => {
                if self.s.unify(&input, &Ty::Bool).is_err() {
                    self.mismatch(span, &Ty::Bool, &input);
                }
                Ty::Bool
            }
        };
        (out, agg.empty_is_none())
    }

    fn infer(&mut self, e: &Expr) -> Ty {
        let t = self.infer_inner(e);
        self.exprs[e.id.0] = Some(t.clone());
        t
    }

    fn infer_inner(&mut self, e: &Expr) -> Ty {
        match &e.kind {
            ExprKind::Lit(l) => match l {
                Literal::Int(n) => {
                    self.int_literals.push((e.id.0, *n, e.span));
                    self.s.fresh(VarKind::Integral)
                }
                Literal::Float(_) => Ty::Float,
                Literal::Bool(_) => Ty::Bool,
                Literal::Str(_) => Ty::Str,
            },
            ExprKind::Const(c) => Ty::from_value_type(&self.spec.constants[c.0].ty),
            ExprKind::Param(i) => self.params[self.current][*i].clone(),
            ExprKind::Access(r) => self.stream_ref(r),
            ExprKind::Offset(r, _) => Ty::Opt(Box::new(self.stream_ref(r))),
            ExprKind::Hold(r, None) => Ty::Opt(Box::new(self.stream_ref(r))),
            ExprKind::Hold(r, Some(d)) => {
                let t = self.stream_ref(r);
                self.expect(d, &t);
                t
            }
            ExprKind::Defaults(inner, d) => {
                let t = self.infer(inner);
                match self.s.resolve(&t) {
                    Ty::Opt(x) => {
                        self.expect(d, &x);
                        *x
                    }
                    _ => {
                        self.diags.push(Diagnostic::error(
                            Code::DefaultOnNonOptional,
                            e.span,
                            format!(
                                "`defaults` needs a value that may be absent, but this one is always {}",
                                Shown(&self.s, t.clone())
                            ),
                        ));
                        self.plain(d);
                        t
                    }
                }
            }
            ExprKind::Window {
                target,
                exact,
                aggregation,
                ..
            } => {
                let input = self.stream_ref(target);
                let (out, empty_none) = self.aggregate(aggregation, input, e.span);
                if *exact || empty_none {
                    Ty::Opt(Box::new(out))
                } else {
                    out
                }
            }
            ExprKind::InstanceAggregate {
                stream, aggregation, ..
            } => {
                let input = self.streams[stream.0].clone();
                let (out, empty_none) = self.aggregate(aggregation, input, e.span);
                if empty_none {
                    Ty::Opt(Box::new(out))
                } else {
                    out
                }
            }
            ExprKind::Call(name, args) => {
                let sig = registry::builtins().get(name).expect("resolved builtin").signature();
                match sig {
                    BuiltinSignature::FloatToFloat => {
                        for a in args {
                            self.expect(a, &Ty::Float);
                        }
                        Ty::Float
                    }
                    BuiltinSignature::NumericSame => {
                        let t = self.s.fresh(VarKind::Numeric);
                        for a in args {
                            self.expect(a, &t);
                        }
                        t
                    }
                }
            }
            ExprKind::Unary(UnOp::Not, x) => {
                self.expect(x, &Ty::Bool);
                Ty::Bool
            }
            ExprKind::Unary(UnOp::Neg, x) => {
                let t = self.s.fresh(VarKind::Numeric);
                self.expect(x, &t);
                t
            }
            ExprKind::Binary(op, l, r) => match op {
                BinOp::And | BinOp::Or => {
                    self.expect(l, &Ty::Bool);
                    self.expect(r, &Ty::Bool);
                    Ty::Bool
                }
                BinOp::Pow => {
                    self.expect(l, &Ty::Float);
                    self.expect(r, &Ty::Float);
                    Ty::Float
                }
                BinOp::Eq | BinOp::Ne => {
                    let t = self.plain(l);
                    self.expect(r, &t);
                    Ty::Bool
                }
                _ => {
                    let t = self.s.fresh(VarKind::Numeric);
                    self.expect(l, &t);
                    self.expect(r, &t);
                    if op.is_comparison() {
                        Ty::Bool
                    } else {
                        t
                    }
                }
            },
            ExprKind::Tuple(elems) => Ty::Tuple(elems.iter().map(|x| self.plain(x)).collect()),
            ExprKind::Project(inner, i) => {
                let t = self.infer(inner);
                match self.s.resolve(&t) {
                    Ty::Opt(x) => Ty::Opt(Box::new(self.project(*x, *i, e.span))),
                    other => self.project(other, *i, e.span),
                }
            }
            ExprKind::Format(tmpl, args) => {
                let holes = tmpl.matches("{}").count();
                if holes != args.len() {
                    self.diags.push(Diagnostic::error(
                        Code::FormatArity,
                        e.span,
                        format!("the message has {holes} placeholder(s) but {} argument(s) are given", args.len()),
                    ));
                }
                for a in args {
                    self.plain(a);
                }
                Ty::Str
            }
        }
    }

    fn project(&mut self, t: Ty, index: usize, span: Span) -> Ty {
        match self.s.resolve(&t) {
            Ty::Tuple(elems) => match elems.get(index) {
                Some(x) => x.clone(),
                None => {
                    self.diags.push(Diagnostic::error(
                        Code::TypeMismatch,
                        span,
                        format!("tuple of {} elements has no component {index}", elems.len()),
                    ));
                    self.s.fresh(VarKind::Any)
                }
            },
            Ty::Var(_) => {
                let result = self.s.fresh(VarKind::Any);
                self.projections.push(Projection {
                    tuple: t,
                    index,
                    result: result.clone(),
                    span,
                });
                result
            }
            other => {
                let msg = format!("cannot project component {index} out of {}", Shown(&self.s, other));
                self.diags.push(Diagnostic::error(Code::TypeMismatch, span, msg));
                self.s.fresh(VarKind::Any)
            }
        }
    }

    fn solve_projections(&mut self) {
        loop {
            let pending = std::mem::take(&mut self.projections);
            let before = pending.len();
            for p in pending {
                match self.s.resolve(&p.tuple) {
                    Ty::Var(_) => self.projections.push(p),
                    _ => {
                        let t = self.project(p.tuple.clone(), p.index, p.span);
                        if self.s.unify(&t, &p.result).is_err() {
                            self.mismatch(p.span, &p.result, &t);
                        }
                    }
                }
            }
            if self.projections.len() == before {
                break;
            }
        }
        for p in std::mem::take(&mut self.projections) {
            self.diags.push(Diagnostic::error(
                Code::TypeMismatch,
                p.span,
                "cannot infer the tuple type of this projection; add a type annotation",
            ));
        }
    }

    fn finish(mut self) -> Result<ValueTypes, Vec<Diagnostic>> {
        let mut streams = Vec::new();
        for (st, t) in self.spec.streams.iter().zip(&self.streams) {
            match self.s.zonk(t) {
                Some(v) => streams.push(v),
                None => {
                    self.diags.push(Diagnostic::error(
                        Code::TypeMismatch,
                        st.span,
                        format!("cannot infer the value type of `{}`; add a type annotation", st.name),
                    ));
                    streams.push(ValueType::Bool);
                }
            }
        }
        let mut params = Vec::new();
        for (st, ps) in self.spec.streams.iter().zip(&self.params) {
            let mut out = Vec::new();
            for (name, p) in st.params.iter().zip(ps) {
                let t = self.s.zonk(p);
                match &t {
                    Some(ValueType::Int | ValueType::UInt | ValueType::Bool | ValueType::String) => {}
                    _ => {
                        let shown = t.as_ref().map_or("an unknown type".to_string(), |t| t.to_string());
                        self.diags.push(Diagnostic::error(
                            Code::InvalidParameterType,
                            st.span,
                            format!(
                                "parameter `{name}` of `{}` has type {shown}; parameters must be Int, UInt, Bool or String",
                                st.name
                            ),
                        ));
                    }
                }
                out.push(t.unwrap_or(ValueType::Int));
            }
            params.push(out);
        }
        let mut exprs = Vec::with_capacity(self.exprs.len());
        for t in &self.exprs {
            exprs.push(t.as_ref().and_then(|t| self.s.zonk(t)).unwrap_or(ValueType::Bool));
        }
        for &(id, n, span) in &self.int_literals {
            if exprs[id] == ValueType::Int && n > i64::MAX as u64 {
                self.diags.push(Diagnostic::error(Code::TypeMismatch, span, format!("literal {n} does not fit in Int")));
            }
        }
        if self.diags.is_empty() {
            Ok(ValueTypes { exprs, streams, params })
        } else {
            Err(self.diags)
        }
    }
}
