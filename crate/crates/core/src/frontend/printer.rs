//! Pretty-printer producing source that parses back to an equal tree.
//!
//! Outputs and triggers are always printed in clause form; periods and
//! window durations are printed in nanoseconds.

use std::fmt::{self, Display, Formatter};

use super::ast::*;

impl Display for Ast {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for i in &self.imports {
            writeln!(f, "import {}", i.name)?;
        }
        for d in &self.declarations {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Display for Declaration {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.kind {
            DeclKind::Input => write!(f, "input {}: {}", self.name.name, self.ty.as_ref().expect("inputs are typed")),
            DeclKind::Constant => write!(
                f,
                "constant {}: {} := {}",
                self.name.name,
                self.ty.as_ref().expect("constants are typed"),
                self.constant_value.as_ref().expect("constants have a value")
            ),
            DeclKind::Output | DeclKind::Trigger => {
                if self.kind == DeclKind::Output {
                    write!(f, "output {}", self.name.name)?;
                } else {
                    f.write_str("trigger")?;
                }
                if !self.parameters.is_empty() {
                    let names: Vec<_> = self.parameters.iter().map(|p| p.name.as_str()).collect();
                    write!(f, "({})", names.join(", "))?;
                }
                if let Some(t) = &self.ty {
                    write!(f, ": {t}")?;
                }
                for (kw, c) in [("spawn", &self.spawn), ("eval", &self.eval), ("close", &self.close)] {
                    if let Some(c) = c {
                        write!(f, "\n    {kw}")?;
                        if let Some(p) = &c.pacing {
                            write!(f, " {p}")?;
                        }
                        if let Some(w) = &c.when {
                            write!(f, " when {w}")?;
                        }
                        if let Some(w) = &c.with {
                            write!(f, " with {w}")?;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

impl Display for TypeExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeExprKind::Named(n) => f.write_str(n),
            TypeExprKind::Tuple(elems) => {
                f.write_str("(")?;
                comma_list(f, elems)?;
                f.write_str(")")
            }
        }
    }
}

impl Display for PacingExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            PacingExpr::Periodic { period, .. } => write!(f, "@{}ns@", period.nanos()),
            PacingExpr::Event(a) => write!(f, "@{a}@"),
        }
    }
}

impl Display for ActivationExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ActivationExpr::True(_) => f.write_str("true"),
            ActivationExpr::Stream(i) => f.write_str(&i.name),
            ActivationExpr::And(l, r) => write!(f, "({l} && {r})"),
            ActivationExpr::Or(l, r) => write!(f, "({l} || {r})"),
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Float(x) => write!(f, "{x:?}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

fn comma_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Binding strength of the outermost construct; postfix chains and atoms
/// bind tightest.
fn strength(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::Unary(..) => 7,
        _ => 8,
    }
}

/// Receivers of `.method` and `.N` need parentheses unless they are atoms
/// that cannot swallow the dot.
fn write_receiver(f: &mut Formatter<'_>, e: &Expr) -> fmt::Result {
    let bare = match &e.kind {
        ExprKind::Lit(Literal::Int(_)) | ExprKind::Lit(Literal::Float(_)) => false,
        _ => strength(e) == 8,
    };
    if bare {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Lit(l) => write!(f, "{l}"),
            ExprKind::Ident(n) => f.write_str(n),
            ExprKind::Apply(n, args) => {
                write!(f, "{}(", n.name)?;
                comma_list(f, args)?;
                f.write_str(")")
            }
            ExprKind::Unary(op, inner) => {
                f.write_str(match op {
                    UnOp::Not => "!",
                    UnOp::Neg => "-",
                })?;
                if strength(inner) < 7 {
                    write!(f, "({inner})")
                } else {
                    write!(f, "{inner}")
                }
            }
            ExprKind::Binary(op, l, r) => {
                let p = op.precedence();
                let lp = strength(l) < p || (strength(l) == p && op.right_assoc());
                let rp = strength(r) < p || (strength(r) == p && !op.right_assoc());
                if lp {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if rp {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            ExprKind::Tuple(elems) => {
                f.write_str("(")?;
                comma_list(f, elems)?;
                f.write_str(")")
            }
            ExprKind::Project(inner, i) => {
                write_receiver(f, inner)?;
                write!(f, ".{i}")
            }
            ExprKind::Offset(inner, n) => {
                write_receiver(f, inner)?;
                write!(f, ".offset(by: -{n})")
            }
            ExprKind::Defaults(inner, d) => {
                write_receiver(f, inner)?;
                write!(f, ".defaults(to: {d})")
            }
            ExprKind::Hold(inner, d) => {
                write_receiver(f, inner)?;
                match d {
                    Some(d) => write!(f, ".hold(or: {d})"),
                    None => f.write_str(".hold()"),
                }
            }
            ExprKind::Window {
                target,
                duration,
                exact,
                using,
            } => {
                write_receiver(f, target)?;
                let label = if *exact { "over_exactly" } else { "over" };
                write!(f, ".aggregate({label}: {}ns, using: {})", duration.nanos(), using.name)
            }
            ExprKind::InstanceAggregate {
                target,
                selection,
                using,
            } => {
                write_receiver(f, target)?;
                let sel = match selection {
                    InstanceSelection::All => "all",
                    InstanceSelection::Fresh => "fresh",
                };
                write!(f, ".aggregate(over_instances: {sel}, using: {})", using.name)
            }
            ExprKind::Format(recv, args) => {
                write_receiver(f, recv)?;
                f.write_str(".format(")?;
                comma_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::frontend::parse;

    fn round_trip(src: &str) {
        let ast = parse(src).unwrap();
        let printed = ast.to_string();
        let again = parse(&printed).unwrap_or_else(|d| panic!("{printed}\n{d:?}"));
        assert_eq!(ast, again, "{printed}");
    }

    #[test]
    fn examples_round_trip() {
        round_trip("import math\ninput lat: Float\nconstant c: Float := -1.5\noutput d: Float := sqrt((c - lat) ** 2.0)\ntrigger d < 0.1 \"close\"");
        round_trip("input a: Int\noutput s := s.offset(by: -1).defaults(to: 0) + a");
        round_trip("input a: Int\noutput x := -(a + 1) * 2 - (3 - 4)\noutput y := (1).0");
        round_trip("input a: Float\noutput x := a ** 2.0 ** 3.0\noutput y := (a ** 2.0) ** 3.0");
        round_trip(
            "input i: UInt\ninput b: Bool\noutput p(id) spawn with i eval when id = i with (i, b) close @true@ when p(id).hold().1.defaults(to: false)\ntrigger(id) spawn with i eval @1Hz@ when true with \"x {}\".format(id)",
        );
        round_trip("input b: Bool\noutput w @1Hz@ := b.aggregate(over_exactly: 5s, using: forall).defaults(to: false)");
    }
}
