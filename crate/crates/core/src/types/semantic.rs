//! Semantic checks on filter conditions and instance lifecycles.
//!
//! Conditions are compared syntactically: non-boolean subterms become
//! opaque atoms keyed by their printed form, and implication between two
//! conditions is decided by a truth table over those atoms. This
//! over-approximates, so some correct specifications are rejected.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::diagnostics::{Code, Diagnostic};
use crate::frontend::ast::{BinOp, InstanceSelection, Literal, UnOp};
use crate::ir::{Clause, ClauseKind, Expr, ExprKind, Spec, Stream};

use super::pacing::{accesses, AccessKind, PacingType, StreamPacing};

/// Largest atom count for which implication is decided exactly; beyond
/// it only syntactic equality counts.
const MAX_ATOMS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum Cond {
    True,
    False,
    Atom(usize),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    fn eval(&self, bits: u64, index: &[usize]) -> bool {
        match self {
            Cond::True => true,
            Cond::False => false,
            Cond::Atom(a) => bits >> index[*a] & 1 == 1,
            Cond::Not(c) => !c.eval(bits, index),
            Cond::And(l, r) => l.eval(bits, index) && r.eval(bits, index),
            Cond::Or(l, r) => l.eval(bits, index) || r.eval(bits, index),
        }
    }

    fn atoms(&self, out: &mut Vec<usize>) {
        match self {
            Cond::Atom(a) => {
                if !out.contains(a) {
                    out.push(*a);
                }
            }
            Cond::Not(c) => c.atoms(out),
            Cond::And(l, r) | Cond::Or(l, r) => {
                l.atoms(out);
                r.atoms(out);
            }
            Cond::True | Cond::False => {}
        }
    }
}

/// `l → r` holds under every assignment to the atoms.
pub fn implies(l: &Cond, r: &Cond) -> bool {
    if l == r || *r == Cond::True || *l == Cond::False {
        return true;
    }
    let mut atoms = Vec::new();
    l.atoms(&mut atoms);
    r.atoms(&mut atoms);
    if atoms.len() > MAX_ATOMS {
        return false;
    }
    let max = atoms.iter().copied().max().map_or(0, |m| m + 1);
    let mut index = vec![0; max];
    for (i, &a) in atoms.iter().enumerate() {
        index[a] = i;
    }
    (0..1u64 << atoms.len()).all(|bits| !l.eval(bits, &index) || r.eval(bits, &index))
}

#[derive(Default)]
pub struct Atoms {
    keys: BTreeMap<String, usize>,
}

impl Atoms {
    pub fn cond(&mut self, spec: &Spec, e: &Expr) -> Cond {
        match &e.kind {
            ExprKind::Lit(Literal::Bool(true)) => Cond::True,
            ExprKind::Lit(Literal::Bool(false)) => Cond::False,
            ExprKind::Unary(UnOp::Not, x) => Cond::Not(Box::new(self.cond(spec, x))),
            ExprKind::Binary(BinOp::And, l, r) => Cond::And(Box::new(self.cond(spec, l)), Box::new(self.cond(spec, r))),
            ExprKind::Binary(BinOp::Or, l, r) => Cond::Or(Box::new(self.cond(spec, l)), Box::new(self.cond(spec, r))),
            _ => {
                let key = canonical(spec, e);
                let next = self.keys.len();
                Cond::Atom(*self.keys.entry(key).or_insert(next))
            }
        }
    }

    fn opt(&mut self, spec: &Spec, e: Option<&Expr>) -> Cond {
        e.map_or(Cond::True, |e| self.cond(spec, e))
    }
}

/// Prints an expression with stream and constant names and positional
/// parameters (`#0`), fully parenthesized.
pub fn canonical(spec: &Spec, e: &Expr) -> String {
    let mut out = String::new();
    write_canonical(spec, e, &mut out);
    out
}

fn write_args(spec: &Spec, args: &[Expr], out: &mut String) {
    if !args.is_empty() {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_canonical(spec, a, out);
        }
        out.push(')');
    }
}

fn write_canonical(spec: &Spec, e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Lit(l) => {
            let _ = write!(out, "{l}");
        }
        ExprKind::Const(c) => out.push_str(&spec.constants[c.0].name),
        ExprKind::Param(i) => {
            let _ = write!(out, "#{i}");
        }
        ExprKind::Access(r) => {
            out.push_str(spec.name(r.stream));
            write_args(spec, &r.args, out);
        }
        ExprKind::Offset(r, n) => {
            out.push_str(spec.name(r.stream));
            write_args(spec, &r.args, out);
            let _ = write!(out, ".offset(by: -{n})");
        }
        ExprKind::Hold(r, d) => {
            out.push_str(spec.name(r.stream));
            write_args(spec, &r.args, out);
            out.push_str(".hold(");
            if let Some(d) = d {
                out.push_str("or: ");
                write_canonical(spec, d, out);
            }
            out.push(')');
        }
        ExprKind::Defaults(x, d) => {
            out.push('(');
            write_canonical(spec, x, out);
            out.push_str(").defaults(to: ");
            write_canonical(spec, d, out);
            out.push(')');
        }
        ExprKind::Window {
            target,
            duration,
            exact,
            aggregation,
        } => {
            out.push_str(spec.name(target.stream));
            write_args(spec, &target.args, out);
            let label = if *exact { "over_exactly" } else { "over" };
            let _ = write!(out, ".aggregate({label}: {}ns, using: {aggregation})", duration.0);
        }
        ExprKind::InstanceAggregate {
            stream,
            selection,
            aggregation,
        } => {
            let sel = match selection {
                InstanceSelection::All => "all",
                InstanceSelection::Fresh => "fresh",
            };
            let _ = write!(out, "{}.aggregate(over_instances: {sel}, using: {aggregation})", spec.name(*stream));
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_canonical(spec, a, out);
            }
            out.push(')');
        }
        ExprKind::Unary(op, x) => {
            out.push_str(match op {
                UnOp::Not => "!(",
                UnOp::Neg => "-(",
            });
            write_canonical(spec, x, out);
            out.push(')');
        }
        ExprKind::Binary(op, l, r) => {
            out.push('(');
            write_canonical(spec, l, out);
            let _ = write!(out, " {} ", op.symbol());
            write_canonical(spec, r, out);
            out.push(')');
        }
        ExprKind::Tuple(elems) => {
            out.push('(');
            for (i, a) in elems.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_canonical(spec, a, out);
            }
            out.push_str(",)");
        }
        ExprKind::Project(x, i) => {
            out.push('(');
            write_canonical(spec, x, out);
            let _ = write!(out, ").{i}");
        }
        ExprKind::Format(t, args) => {
            let _ = write!(out, "{}.format", Literal::Str(t.clone()));
            write_args(spec, args, out);
        }
    }
}

struct Conds {
    spawn: Cond,
    eval: Cond,
    close: Option<Cond>,
}

fn same_clause(spec: &Spec, a: Option<&Clause>, pa: Option<&PacingType>, b: Option<&Clause>, pb: Option<&PacingType>) -> bool {
    let text = |c: Option<&Clause>| {
        c.map(|c| {
            (
                c.when.as_ref().map(|e| canonical(spec, e)),
                c.with.as_ref().map(|e| canonical(spec, e)),
            )
        })
    };
    pa == pb && text(a) == text(b)
}

fn is_identity(args: &[Expr], arity: usize) -> bool {
    args.len() == arity && args.iter().enumerate().all(|(i, a)| matches!(a.kind, ExprKind::Param(p) if p == i))
}

/// Rejects accesses that may find the accessed stream without a value:
/// a filter that may be false, or an instance that may not exist.
pub fn check_semantics(spec: &Spec, pacing: &[StreamPacing]) -> Result<(), Vec<Diagnostic>> {
    let mut atoms = Atoms::default();
    let conds: Vec<Conds> = spec
        .streams
        .iter()
        .map(|s| Conds {
            spawn: atoms.opt(spec, s.spawn.as_ref().and_then(|c| c.when.as_ref())),
            eval: atoms.opt(spec, s.eval.as_ref().and_then(|c| c.when.as_ref())),
            close: s.close.as_ref().map(|c| atoms.opt(spec, c.when.as_ref())),
        })
        .collect();
    let mut diags = Vec::new();
    for a in spec.streams.iter().filter(|s| !s.is_input()) {
        for clause in a.clauses() {
            for acc in accesses(clause) {
                if !matches!(acc.kind, AccessKind::Sync | AccessKind::Offset) || acc.target == a.id {
                    continue;
                }
                let b = spec.stream(acc.target);
                if b.is_input() {
                    continue;
                }
                let context = match (clause.kind, acc.in_when) {
                    (_, true) => Cond::True,
                    (ClauseKind::Eval, false) => conds[a.id.0].eval.clone(),
                    (ClauseKind::Spawn, false) => conds[a.id.0].spawn.clone(),
                    (ClauseKind::Close, false) => conds[a.id.0].close.clone().unwrap_or(Cond::True),
                };
                if !implies(&context, &conds[b.id.0].eval) {
                    diags.push(Diagnostic::error(
                        Code::WhenConditionGap,
                        acc.span,
                        format!(
                            "`{}` is read where its filter condition may be false; `{}` only has a value when its `when` condition holds",
                            b.name, b.name
                        ),
                    ));
                    continue;
                }
                if let Some(msg) = lifecycle(spec, pacing, &conds, a, b, clause.kind, acc.args) {
                    diags.push(msg.with_span(acc.span));
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

struct Pending {
    code: Code,
    message: String,
}

impl Pending {
    fn with_span(self, span: crate::diagnostics::Span) -> Diagnostic {
        Diagnostic::error(self.code, span, self.message)
    }
}

fn lifecycle(
    spec: &Spec,
    pacing: &[StreamPacing],
    conds: &[Conds],
    a: &Stream,
    b: &Stream,
    kind: ClauseKind,
    args: &[Expr],
) -> Option<Pending> {
    let (pa, pb) = (&pacing[a.id.0], &pacing[b.id.0]);
    let fail = |why: &str| {
        Some(Pending {
            code: Code::LifecycleGap,
            message: format!("`{}` may be read while no matching instance of it exists: {why}", b.name),
        })
    };
    if kind == ClauseKind::Spawn {
        if b.spawn.is_some() || b.close.is_some() {
            return fail(&format!("the spawn clause of `{}` may only read streams that always exist", a.name));
        }
        return None;
    }
    if pa.eval.is_periodic() && pb.eval.is_periodic() {
        let spawn_same = same_clause(spec, a.spawn.as_ref(), pa.spawn.as_ref(), b.spawn.as_ref(), pb.spawn.as_ref());
        let close_same = same_clause(spec, a.close.as_ref(), pa.close.as_ref(), b.close.as_ref(), pb.close.as_ref());
        if !(spawn_same && close_same) {
            return Some(Pending {
                code: Code::PeriodicLifecycleMismatch,
                message: format!(
                    "periodic `{}` reads periodic `{}`, so both need identical spawn and close clauses",
                    a.name, b.name
                ),
            });
        }
        return None;
    }
    if let Some(bs) = &pb.spawn {
        let Some(as_) = &pa.spawn else {
            return fail(&format!("`{}` is spawned dynamically but `{}` always exists", b.name, a.name));
        };
        if !as_.entails(bs) || !implies(&conds[a.id.0].spawn, &conds[b.id.0].spawn) {
            return fail(&format!("the spawn of `{}` does not imply the spawn of `{}`", a.name, b.name));
        }
        if b.is_parameterized() {
            if !is_identity(args, b.params.len()) || a.params.len() != b.params.len() {
                return fail("parameterized streams must be read with the accessing stream's own parameters");
            }
            let with = |s: &Stream| s.spawn.as_ref().and_then(|c| c.with.as_ref()).map(|e| canonical(spec, e));
            if with(a) != with(b) {
                return fail(&format!("`{}` and `{}` are spawned with different parameter values", a.name, b.name));
            }
        }
    }
    if let (Some(bc), Some(bcond)) = (&pb.close, &conds[b.id.0].close) {
        let (Some(ac), Some(acond)) = (&pa.close, &conds[a.id.0].close) else {
            return fail(&format!("`{}` may close while `{}` stays alive", b.name, a.name));
        };
        if !bc.entails(ac) || !implies(bcond, acond) {
            return fail(&format!("the close of `{}` does not imply the close of `{}`", b.name, a.name));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, resolve};
    use crate::types::pacing::{check_accesses, infer_pacing};

    fn semantic(src: &str) -> Result<(), Vec<Code>> {
        let spec = resolve(&parse(src).unwrap()).unwrap();
        let p = infer_pacing(&spec).unwrap();
        check_accesses(&spec, &p).unwrap();
        check_semantics(&spec, &p).map_err(|d| d.into_iter().map(|d| d.code).collect())
    }

    #[test]
    fn implication() {
        let a = Cond::Atom(0);
        let b = Cond::Atom(1);
        let ab = Cond::And(Box::new(a.clone()), Box::new(b.clone()));
        assert!(implies(&ab, &a));
        assert!(!implies(&a, &ab));
        assert!(implies(&a, &Cond::Or(Box::new(a.clone()), Box::new(b.clone()))));
        assert!(implies(&Cond::Not(Box::new(Cond::Not(Box::new(a.clone())))), &a));
        assert!(!implies(&Cond::True, &a));
    }

    #[test]
    fn filter_gap() {
        let src = "input a: Int\noutput x eval @a@ when a > 4 with a\noutput y eval @a@ when a > 3 with x";
        assert_eq!(semantic(src), Err(vec![Code::WhenConditionGap]));
        let ok = "input a: Int\noutput x eval @a@ when a > 3 with a\noutput y eval @a@ when a > 3 && a < 9 with x";
        assert_eq!(semantic(ok), Ok(()));
    }

    #[test]
    fn shifted_periodicity() {
        let src = "input a: Int\noutput x spawn when a > 3 eval @1Hz@ with a.hold(or: 0)\noutput y spawn when a > 4 eval @1Hz@ with x";
        assert_eq!(semantic(src), Err(vec![Code::PeriodicLifecycleMismatch]));
        let ok = "input a: Int\noutput x spawn when a > 3 eval @1Hz@ with a.hold(or: 0)\noutput y spawn when a > 3 eval @1Hz@ with x";
        assert_eq!(semantic(ok), Ok(()));
    }

    #[test]
    fn instances_must_match() {
        let base = "input i: UInt\ninput v: Int\noutput p(id) spawn with i eval when id = i with v\n";
        assert_eq!(semantic(&format!("{base}output q(id) spawn with i eval when id = i with p(id)")), Ok(()));
        assert_eq!(
            semantic(&format!("{base}output q spawn when v > 0 eval when v > 1 with v")),
            Ok(())
        );
        let plain = "input i: UInt\ninput v: Int\noutput p(id) spawn with i eval with v\n";
        assert_eq!(
            semantic(&format!("{plain}output r @i && v@ := p(i)")),
            Err(vec![Code::LifecycleGap])
        );
    }

    #[test]
    fn close_must_follow() {
        let src = "input a: Int\noutput x spawn when a > 0 eval with a close when a > 9\noutput y spawn when a > 0 eval with x";
        assert_eq!(semantic(src), Err(vec![Code::LifecycleGap]));
        let ok = "input a: Int\noutput x spawn when a > 0 eval with a close when a > 9\noutput y spawn when a > 0 eval with x close when a > 9";
        assert_eq!(semantic(ok), Ok(()));
    }
}
