//! Binds identifiers to streams, constants and parameters.

use std::collections::{HashMap, HashSet};

use super::ast::{self, ActivationExpr, DeclKind, ExprKind as A, Literal, PacingExpr, TypeExpr, TypeExprKind};
use crate::activation::Activation;
use crate::diagnostics::{Code, Diagnostic, Span};
use crate::ir::*;
use crate::registry;
use crate::types::ValueType;

#[derive(Clone, Copy)]
enum Binding {
    Stream(StreamId),
    Const(ConstId),
}

pub fn resolve(ast: &ast::Ast) -> Result<Spec, Vec<Diagnostic>> {
    let mut r = Resolver {
        bindings: HashMap::new(),
        kinds: Vec::new(),
        arity: Vec::new(),
        all_params: HashSet::new(),
        math: ast.imports.iter().any(|i| i.name == "math"),
        next_expr: 0,
        diags: Vec::new(),
        params: Vec::new(),
    };
    let mut constants = Vec::new();
    for decl in &ast.declarations {
        if decl.kind == DeclKind::Constant {
            r.bindings.insert(decl.name.name.clone(), Binding::Const(ConstId(constants.len())));
            let ty = decl.ty.as_ref().and_then(|t| r.type_expr(t)).unwrap_or(ValueType::Int);
            constants.push(Constant {
                name: decl.name.name.clone(),
                ty,
                value: decl.constant_value.clone().unwrap_or(Literal::Int(0)),
                span: decl.span,
            });
        } else {
            let id = StreamId(r.kinds.len());
            r.bindings.insert(decl.name.name.clone(), Binding::Stream(id));
            r.kinds.push(match decl.kind {
                DeclKind::Input => StreamKind::Input,
                DeclKind::Trigger => StreamKind::Trigger,
                _ => StreamKind::Output,
            });
            r.arity.push(decl.parameters.len());
            r.all_params.extend(decl.parameters.iter().map(|p| p.name.clone()));
        }
    }

    let mut streams = Vec::new();
    for decl in ast.declarations.iter().filter(|d| d.kind != DeclKind::Constant) {
        let id = StreamId(streams.len());
        r.params = decl.parameters.iter().map(|p| p.name.clone()).collect();
        let annotation = match (&decl.ty, decl.kind) {
            (Some(t), _) => r.type_expr(t),
            (None, _) => None,
        };
        let spawn = decl.spawn.as_ref().map(|c| r.clause(c, ClauseKind::Spawn));
        let eval = decl.eval.as_ref().map(|c| r.clause(c, ClauseKind::Eval));
        let close = decl.close.as_ref().map(|c| r.clause(c, ClauseKind::Close));
        streams.push(Stream {
            id,
            name: decl.name.name.clone(),
            kind: r.kinds[id.0],
            params: r.params.clone(),
            annotation,
            spawn,
            eval,
            close,
            span: decl.span,
        });
    }

    if r.diags.is_empty() {
        Ok(Spec {
            streams,
            constants,
            expr_count: r.next_expr,
        })
    } else {
        Err(r.diags)
    }
}

struct Resolver {
    bindings: HashMap<String, Binding>,
    kinds: Vec<StreamKind>,
    arity: Vec<usize>,
    all_params: HashSet<String>,
    math: bool,
    next_expr: usize,
    diags: Vec<Diagnostic>,
    /// Parameters of the declaration being resolved.
    params: Vec<String>,
}

impl Resolver {
    fn err(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn mk(&mut self, kind: ExprKind, span: Span) -> Expr {
        let id = ExprId(self.next_expr);
        self.next_expr += 1;
        Expr { id, kind, span }
    }

    fn type_expr(&mut self, t: &TypeExpr) -> Option<ValueType> {
        match &t.kind {
            TypeExprKind::Named(n) => {
                let ty = ValueType::from_name(n);
                if ty.is_none() {
                    self.err(Code::UnknownIdentifier, t.span, format!("unknown type `{n}`"));
                }
                ty
            }
            TypeExprKind::Tuple(elems) => {
                let tys: Vec<_> = elems.iter().map(|e| self.type_expr(e)).collect();
                tys.into_iter().collect::<Option<Vec<_>>>().map(ValueType::Tuple)
            }
        }
    }

    fn clause(&mut self, c: &ast::Clause, kind: ClauseKind) -> Clause {
        let pacing = c.pacing.as_ref().and_then(|p| self.pacing(p));
        let when = c.when.as_ref().map(|e| self.expr(e));
        let with = c.with.as_ref().map(|e| self.expr(e));
        Clause {
            kind,
            pacing,
            when,
            with,
            span: c.span,
        }
    }

    fn pacing(&mut self, p: &PacingExpr) -> Option<PacingAnnotation> {
        match p {
            PacingExpr::Periodic { period, span } => Some(PacingAnnotation::Periodic(*period, *span)),
            PacingExpr::Event(a) => self.activation(a).map(|act| PacingAnnotation::Event(act, a.span())),
        }
    }

    fn activation(&mut self, a: &ActivationExpr) -> Option<Activation> {
        match a {
            ActivationExpr::True(_) => Some(Activation::always()),
            ActivationExpr::Stream(id) => match self.bindings.get(&id.name) {
                Some(Binding::Stream(s)) if self.kinds[s.0] == StreamKind::Input => Some(Activation::var(*s)),
                Some(_) => {
                    self.err(
                        Code::InvalidAccess,
                        id.span,
                        format!("activation conditions may only mention input streams, `{}` is not one", id.name),
                    );
                    None
                }
                None => {
                    self.err(Code::UnknownIdentifier, id.span, format!("unknown input stream `{}`", id.name));
                    None
                }
            },
            ActivationExpr::And(l, r) => {
                let (l, r) = (self.activation(l), self.activation(r));
                Some(l?.and(&r?))
            }
            ActivationExpr::Or(l, r) => {
                let (l, r) = (self.activation(l), self.activation(r));
                Some(l?.or(&r?))
            }
        }
    }

    fn unknown_name(&mut self, name: &str, span: Span) {
        if self.all_params.contains(name) {
            self.err(
                Code::ParameterScope,
                span,
                format!("parameter `{name}` belongs to another stream and is not visible here"),
            );
        } else {
            self.err(Code::UnknownIdentifier, span, format!("unknown identifier `{name}`"));
        }
    }

    /// Resolves `name` or `name(args)` as a stream access.
    fn stream_ref(&mut self, e: &ast::Expr) -> Option<StreamRef> {
        let (name, args, span) = match &e.kind {
            A::Ident(n) => (n.as_str(), &[][..], e.span),
            A::Apply(n, args) => (n.name.as_str(), &args[..], n.span),
            _ => return None,
        };
        if self.params.iter().any(|p| p == name) {
            return None;
        }
        let id = match self.bindings.get(name) {
            Some(Binding::Stream(id)) => *id,
            _ => return None,
        };
        if self.kinds[id.0] == StreamKind::Trigger {
            self.err(Code::InvalidAccess, span, format!("trigger `{name}` cannot be accessed"));
        }
        if args.len() != self.arity[id.0] {
            self.err(
                Code::ArityMismatch,
                e.span,
                format!(
                    "`{name}` takes {} instance argument(s) but {} were given",
                    self.arity[id.0],
                    args.len()
                ),
            );
        }
        let args = args.iter().map(|a| self.expr(a)).collect();
        Some(StreamRef { stream: id, args })
    }

    fn stream_target(&mut self, e: &ast::Expr, what: &str) -> Option<StreamRef> {
        let r = self.stream_ref(e);
        if r.is_none() {
            self.err(Code::InvalidAccess, e.span, format!("{what} can only be applied to a stream"));
        }
        r
    }

    fn expr(&mut self, e: &ast::Expr) -> Expr {
        let kind = match &e.kind {
            A::Lit(l) => ExprKind::Lit(l.clone()),
            A::Ident(name) => {
                if let Some(i) = self.params.iter().position(|p| p == name) {
                    ExprKind::Param(i)
                } else {
                    match self.bindings.get(name).copied() {
                        Some(Binding::Const(c)) => ExprKind::Const(c),
                        Some(Binding::Stream(_)) => match self.stream_ref(e) {
                            Some(r) => ExprKind::Access(r),
                            None => ExprKind::Lit(Literal::Bool(false)),
                        },
                        None => {
                            self.unknown_name(name, e.span);
                            ExprKind::Lit(Literal::Bool(false))
                        }
                    }
                }
            }
            A::Apply(f, args) => match self.bindings.get(&f.name).copied() {
                _ if self.params.contains(&f.name) => {
                    self.err(Code::InvalidAccess, f.span, format!("parameter `{}` cannot be applied", f.name));
                    ExprKind::Lit(Literal::Bool(false))
                }
                Some(Binding::Stream(_)) => match self.stream_ref(e) {
                    Some(r) => ExprKind::Access(r),
                    None => ExprKind::Lit(Literal::Bool(false)),
                },
                Some(Binding::Const(_)) => {
                    self.err(Code::InvalidAccess, f.span, format!("constant `{}` cannot be applied", f.name));
                    ExprKind::Lit(Literal::Bool(false))
                }
                None => {
                    match registry::builtins().get(&f.name) {
                        None => self.err(Code::UnknownFunction, f.span, format!("unknown function `{}`", f.name)),
                        Some(_) if !self.math => self.err(
                            Code::MissingImport,
                            f.span,
                            format!("`{}` needs `import math`", f.name),
                        ),
                        Some(b) if b.arity() != args.len() => self.err(
                            Code::ArityMismatch,
                            e.span,
                            format!("`{}` takes {} argument(s) but {} were given", f.name, b.arity(), args.len()),
                        ),
                        Some(_) => {}
                    }
                    let args = args.iter().map(|a| self.expr(a)).collect();
                    ExprKind::Call(f.name.clone(), args)
                }
            },
            A::Unary(op, inner) => ExprKind::Unary(*op, Box::new(self.expr(inner))),
            A::Binary(op, l, r) => ExprKind::Binary(*op, Box::new(self.expr(l)), Box::new(self.expr(r))),
            A::Tuple(elems) => ExprKind::Tuple(elems.iter().map(|x| self.expr(x)).collect()),
            A::Project(inner, i) => ExprKind::Project(Box::new(self.expr(inner)), *i),
            A::Offset(target, n) => match self.stream_target(target, "`offset`") {
                Some(r) => ExprKind::Offset(r, *n),
                None => ExprKind::Lit(Literal::Bool(false)),
            },
            A::Hold(target, default) => {
                let r = self.stream_target(target, "`hold`");
                let d = default.as_ref().map(|d| Box::new(self.expr(d)));
                match r {
                    Some(r) => ExprKind::Hold(r, d),
                    None => ExprKind::Lit(Literal::Bool(false)),
                }
            }
            A::Defaults(inner, d) => ExprKind::Defaults(Box::new(self.expr(inner)), Box::new(self.expr(d))),
            A::Window {
                target,
                duration,
                exact,
                using,
            } => {
                self.aggregation(using);
                match self.stream_target(target, "a sliding window") {
                    Some(r) => {
                        for a in &r.args {
                            self.check_static(a);
                        }
                        ExprKind::Window {
                            target: r,
                            duration: *duration,
                            exact: *exact,
                            aggregation: using.name.clone(),
                        }
                    }
                    None => ExprKind::Lit(Literal::Bool(false)),
                }
            }
            A::InstanceAggregate {
                target,
                selection,
                using,
            } => {
                self.aggregation(using);
                let stream = match &target.kind {
                    A::Ident(n) if !self.params.contains(n) => match self.bindings.get(n) {
                        Some(Binding::Stream(id)) if self.kinds[id.0] == StreamKind::Output && self.arity[id.0] > 0 => {
                            Some(*id)
                        }
                        _ => None,
                    },
                    _ => None,
                };
                match stream {
                    Some(stream) => ExprKind::InstanceAggregate {
                        stream,
                        selection: *selection,
                        aggregation: using.name.clone(),
                    },
                    None => {
                        self.err(
                            Code::InvalidAccess,
                            target.span,
                            "instance aggregation needs the bare name of a parameterized output",
                        );
                        ExprKind::Lit(Literal::Bool(false))
                    }
                }
            }
            A::Format(recv, args) => {
                let args = args.iter().map(|a| self.expr(a)).collect();
                match &recv.kind {
                    A::Lit(Literal::Str(s)) => ExprKind::Format(s.clone(), args),
                    _ => {
                        self.err(Code::InvalidAccess, recv.span, "`format` can only be called on a string literal");
                        ExprKind::Lit(Literal::Bool(false))
                    }
                }
            }
        };
        self.mk(kind, e.span)
    }

    fn aggregation(&mut self, using: &ast::Ident) {
        if registry::aggregations().get(&using.name).is_none() {
            let known: Vec<_> = registry::aggregations().names().collect();
            self.err(
                Code::UnknownFunction,
                using.span,
                format!("unknown aggregation `{}`; expected one of {}", using.name, known.join(", ")),
            );
        }
    }

    /// Window targets are fixed when the aggregating instance is created, so
    /// their arguments may only use parameters, constants and literals.
    fn check_static(&mut self, e: &Expr) {
        let mut bad = None;
        e.walk(&mut |x| {
            if matches!(
                x.kind,
                ExprKind::Access(_)
                    | ExprKind::Offset(..)
                    | ExprKind::Hold(..)
                    | ExprKind::Window { .. }
                    | ExprKind::InstanceAggregate { .. }
            ) && bad.is_none()
            {
                bad = Some(x.span);
            }
        });
        if let Some(span) = bad {
            self.err(
                Code::InvalidAccess,
                span,
                "window targets may only be instantiated with parameters, constants and literals",
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn codes(src: &str) -> Vec<Code> {
        match resolve(&parse(src).unwrap()) {
            Ok(_) => vec![],
            Err(d) => d.into_iter().map(|d| d.code).collect(),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(codes("output x := y"), vec![Code::UnknownIdentifier]);
    }

    #[test]
    fn instance_arity() {
        let base = "input i: UInt\noutput c(p) spawn with i eval with p\n";
        assert!(codes(&format!("{base}output d(q) spawn with i eval with c(q)")).is_empty());
        assert_eq!(
            codes(&format!("{base}output d(q) spawn with i eval with c(q, q)")),
            vec![Code::ArityMismatch]
        );
        assert_eq!(codes(&format!("{base}output d := c")), vec![Code::ArityMismatch]);
    }

    #[test]
    fn parameter_scope() {
        let src = "input i: UInt\noutput c(p) spawn with i eval with p\noutput d := p";
        assert_eq!(codes(src), vec![Code::ParameterScope]);
    }

    #[test]
    fn math_needs_import() {
        assert_eq!(codes("input a: Float\noutput x := sqrt(a)"), vec![Code::MissingImport]);
        assert!(codes("import math\ninput a: Float\noutput x := sqrt(a)").is_empty());
        assert_eq!(codes("input a: Float\noutput x := frob(a)"), vec![Code::UnknownFunction]);
    }

    #[test]
    fn triggers_are_not_accessible() {
        assert_eq!(codes("input a: Bool\ntrigger a\noutput x := trigger_0"), vec![Code::InvalidAccess]);
    }

    #[test]
    fn activation_mentions_inputs_only() {
        assert_eq!(
            codes("input a: Int\noutput x := a\noutput y @x@ := a"),
            vec![Code::InvalidAccess]
        );
    }

    #[test]
    fn window_target_must_be_static() {
        let base = "input i: UInt\noutput c(p) spawn with i eval with p\n";
        assert!(codes(&format!("{base}output d(q) spawn with i eval @1Hz@ with c(q).aggregate(over: 1s, using: count)")).is_empty());
        assert_eq!(
            codes(&format!("{base}output d @1Hz@ := c(i).aggregate(over: 1s, using: count)")),
            vec![Code::InvalidAccess]
        );
    }

    #[test]
    fn binds_parameters_positionally() {
        let spec = resolve(&parse("input i: UInt\noutput c(p) spawn with i eval with p").unwrap()).unwrap();
        let with = spec.streams[1].eval.as_ref().unwrap().with.as_ref().unwrap();
        assert!(matches!(with.kind, ExprKind::Param(0)));
    }
}
