//! Pacing types: when each clause of each stream is evaluated.

use std::fmt;

use crate::activation::Activation;
use crate::diagnostics::{Code, Diagnostic, Span};
use crate::frontend::ast::InstanceSelection;
use crate::ir::{Clause, ClauseKind, Expr, ExprKind, PacingAnnotation, Spec, Stream, StreamId, StreamRef};
use crate::time::Duration;

/// Where the clock of a periodic stream starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// Multiples of the period since monitor start.
    Global,
    /// Multiples of the period since the instance was spawned.
    Spawn,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PacingType {
    Event(Activation),
    Periodic { period: Duration, anchor: Anchor },
}

impl PacingType {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PacingType::Periodic { .. })
    }

    pub fn period(&self) -> Option<Duration> {
        match self {
            PacingType::Periodic { period, .. } => Some(*period),
            PacingType::Event(_) => None,
        }
    }

    /// Every instant at which `self` is due, `other` is due as well.
    pub fn entails(&self, other: &PacingType) -> bool {
        match (self, other) {
            (PacingType::Event(a), PacingType::Event(b)) => a.entails(b),
            (PacingType::Periodic { period: p, anchor: x }, PacingType::Periodic { period: q, anchor: y }) => {
                x == y && p.0 % q.0 == 0
            }
            _ => false,
        }
    }

    pub fn display<'a>(&'a self, spec: &'a Spec) -> impl fmt::Display + 'a {
        Shown(self, spec)
    }
}

struct Shown<'a>(&'a PacingType, &'a Spec);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            PacingType::Event(a) => {
                let names = |s: StreamId| self.1.name(s).to_string();
                let shown = a.display(&names);
                write!(f, "@{shown}@")
            }
            PacingType::Periodic { period, anchor } => {
                write!(f, "@{period}@")?;
                if *anchor == Anchor::Spawn {
                    f.write_str(" (from spawn)")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamPacing {
    pub spawn: Option<PacingType>,
    pub eval: PacingType,
    pub close: Option<PacingType>,
}

impl StreamPacing {
    pub fn clause(&self, kind: ClauseKind) -> Option<&PacingType> {
        match kind {
            ClauseKind::Spawn => self.spawn.as_ref(),
            ClauseKind::Eval => Some(&self.eval),
            ClauseKind::Close => self.close.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessKind {
    Sync,
    Offset,
    Hold,
    Window,
    Instances(InstanceSelection),
}

/// One stream access inside a clause.
pub struct Access<'a> {
    pub target: StreamId,
    pub kind: AccessKind,
    pub args: &'a [Expr],
    pub span: Span,
    /// Inside the `when` part rather than the `with` part.
    pub in_when: bool,
}

impl Access<'_> {
    /// Accesses that need the target's value in the current cycle.
    pub fn is_synchronous(&self) -> bool {
        matches!(
            self.kind,
            AccessKind::Sync | AccessKind::Offset | AccessKind::Instances(InstanceSelection::Fresh)
        )
    }
}

pub fn accesses(clause: &Clause) -> Vec<Access<'_>> {
    let mut out = Vec::new();
    for (in_when, e) in clause.when.iter().map(|e| (true, e)).chain(clause.with.iter().map(|e| (false, e))) {
        e.walk(&mut |x| {
            let (r, kind): (&StreamRef, AccessKind) = match &x.kind {
                ExprKind::Access(r) => (r, AccessKind::Sync),
                ExprKind::Offset(r, _) => (r, AccessKind::Offset),
                ExprKind::Hold(r, _) => (r, AccessKind::Hold),
                ExprKind::Window { target, .. } => (target, AccessKind::Window),
                ExprKind::InstanceAggregate { stream, selection, .. } => {
                    out.push(Access {
                        target: *stream,
                        kind: AccessKind::Instances(*selection),
                        args: &[],
                        span: x.span,
                        in_when,
                    });
                    return;
                }
                _ => return,
            };
            out.push(Access {
                target: r.stream,
                kind,
                args: &r.args,
                span: x.span,
                in_when,
            });
        });
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

enum Combined {
    Nothing,
    Event(Activation),
    Periodic(u64),
    Mixed,
    Overflow,
}

fn combine(acc: Combined, p: &PacingType) -> Combined {
    match (acc, p) {
        (Combined::Nothing, PacingType::Event(a)) => Combined::Event(a.clone()),
        (Combined::Nothing, PacingType::Periodic { period, .. }) => Combined::Periodic(period.0),
        (Combined::Event(x), PacingType::Event(a)) => Combined::Event(x.and(a)),
        (Combined::Periodic(x), PacingType::Periodic { period, .. }) => match lcm(x, period.0) {
            Some(l) => Combined::Periodic(l),
            None => Combined::Overflow,
        },
        (Combined::Mixed, _) | (Combined::Overflow, _) => Combined::Mixed,
        _ => Combined::Mixed,
    }
}

fn anchor_of(stream: &Stream, kind: ClauseKind) -> Anchor {
    if kind != ClauseKind::Spawn && stream.spawn.is_some() {
        Anchor::Spawn
    } else {
        Anchor::Global
    }
}

fn from_annotation(a: &PacingAnnotation, stream: &Stream, kind: ClauseKind) -> PacingType {
    match a {
        PacingAnnotation::Event(act, _) => PacingType::Event(act.clone()),
        PacingAnnotation::Periodic(d, _) => PacingType::Periodic {
            period: *d,
            anchor: anchor_of(stream, kind),
        },
    }
}

/// Streams whose eval pacing an unannotated clause inherits.
fn inference_sources(stream: &Stream, clause: &Clause) -> Vec<StreamId> {
    let mut out: Vec<StreamId> = accesses(clause)
        .into_iter()
        .filter(|a| a.is_synchronous())
        .filter(|a| !(a.target == stream.id && clause.kind != ClauseKind::Close))
        .map(|a| a.target)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Infers the pacing of every clause. Annotated clauses keep their
/// annotation; the others evaluate whenever all the streams they
/// synchronously read are evaluated.
pub fn infer_pacing(spec: &Spec) -> Result<Vec<StreamPacing>, Vec<Diagnostic>> {
    let n = spec.streams.len();
    let mut eval: Vec<Option<PacingType>> = vec![None; n];
    let mut diags = Vec::new();
    let mut fixed = vec![false; n];
    for s in &spec.streams {
        if s.is_input() {
            eval[s.id.0] = Some(PacingType::Event(Activation::var(s.id)));
            fixed[s.id.0] = true;
        } else if let Some(a) = s.eval.as_ref().and_then(|c| c.pacing.as_ref()) {
            eval[s.id.0] = Some(from_annotation(a, s, ClauseKind::Eval));
            fixed[s.id.0] = true;
        }
    }
    // Inferred eval pacings only ever grow stronger, and can only combine
    // already present periods, so this terminates.
    let mut mixed = vec![false; n];
    loop {
        let mut changed = false;
        for s in &spec.streams {
            if fixed[s.id.0] || mixed[s.id.0] {
                continue;
            }
            let clause = s.eval.as_ref().expect("outputs have an eval clause");
            let mut acc = Combined::Nothing;
            for src in inference_sources(s, clause) {
                if let Some(p) = &eval[src.0] {
                    acc = combine(acc, p);
                }
            }
            let next = match acc {
                Combined::Nothing => None,
                Combined::Event(a) => Some(PacingType::Event(a)),
                Combined::Periodic(p) => Some(PacingType::Periodic {
                    period: Duration(p),
                    anchor: anchor_of(s, ClauseKind::Eval),
                }),
                Combined::Mixed | Combined::Overflow => {
                    mixed[s.id.0] = true;
                    changed = true;
                    continue;
                }
            };
            if next != eval[s.id.0] {
                eval[s.id.0] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for s in &spec.streams {
        if mixed[s.id.0] {
            diags.push(mixed_diag(spec, s, ClauseKind::Eval));
        } else if eval[s.id.0].is_none() {
            diags.push(underdetermined(s, ClauseKind::Eval));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let eval: Vec<PacingType> = eval.into_iter().map(|p| p.expect("checked above")).collect();
    let mut out = Vec::with_capacity(n);
    for s in &spec.streams {
        let mut side = |kind: ClauseKind| -> Option<PacingType> {
            let clause = s.clause(kind)?;
            if let Some(a) = &clause.pacing {
                return Some(from_annotation(a, s, kind));
            }
            let mut acc = Combined::Nothing;
            for src in inference_sources(s, clause) {
                acc = combine(acc, &eval[src.0]);
            }
            match acc {
                Combined::Nothing => {
                    diags.push(underdetermined(s, kind));
                    None
                }
                Combined::Event(a) => Some(PacingType::Event(a)),
                Combined::Periodic(p) => Some(PacingType::Periodic {
                    period: Duration(p),
                    anchor: anchor_of(s, kind),
                }),
                Combined::Mixed | Combined::Overflow => {
                    diags.push(mixed_diag(spec, s, kind));
                    None
                }
            }
        };
        let spawn = side(ClauseKind::Spawn);
        let close = side(ClauseKind::Close);
        out.push(StreamPacing {
            spawn,
            eval: eval[s.id.0].clone(),
            close,
        });
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

fn clause_span(s: &Stream, kind: ClauseKind) -> Span {
    s.clause(kind).map_or(s.span, |c| c.span)
}

fn underdetermined(s: &Stream, kind: ClauseKind) -> Diagnostic {
    Diagnostic::error(
        Code::PacingUnderdetermined,
        clause_span(s, kind),
        format!(
            "cannot infer when the {} clause of `{}` is evaluated; annotate it with a pacing such as `@1Hz@` or `@input@`",
            kind.as_str(),
            s.name
        ),
    )
}

fn mixed_diag(spec: &Spec, s: &Stream, kind: ClauseKind) -> Diagnostic {
    let clause = s.clause(kind).expect("inferred clauses exist");
    let names: Vec<_> = inference_sources(s, clause).into_iter().map(|x| spec.name(x).to_string()).collect();
    Diagnostic::error(
        Code::PacingMix,
        clause.span,
        format!(
            "the {} clause of `{}` reads both event-based and periodic streams ({}); annotate it and read the others with `hold`",
            kind.as_str(),
            s.name,
            names.join(", ")
        ),
    )
}

/// Checks that every synchronous access happens only when the accessed
/// stream is evaluated.
pub fn check_accesses(spec: &Spec, pacing: &[StreamPacing]) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    for s in spec.streams.iter().filter(|s| !s.is_input()) {
        for clause in s.clauses() {
            let own = pacing[s.id.0].clause(clause.kind).expect("inferred");
            for acc in accesses(clause).into_iter().filter(|a| a.is_synchronous()) {
                if acc.target == s.id && clause.kind == ClauseKind::Eval {
                    continue;
                }
                let theirs = &pacing[acc.target.0].eval;
                let target = spec.name(acc.target);
                let diag = match (own, theirs) {
                    (PacingType::Event(a), PacingType::Event(b)) if !a.entails(b) => Some(Diagnostic::error(
                        Code::PacingEntailment,
                        acc.span,
                        format!(
                            "the {} clause of `{}` runs at {} but `{target}` only at {}; use `{target}.hold()` or tighten the pacing",
                            clause.kind.as_str(),
                            s.name,
                            own.display(spec),
                            theirs.display(spec)
                        ),
                    )),
                    (PacingType::Periodic { period: p, anchor: x }, PacingType::Periodic { period: q, anchor: y }) => {
                        if p.0 % q.0 != 0 {
                            Some(Diagnostic::error(
                                Code::PeriodMismatch,
                                acc.span,
                                format!(
                                    "`{}` runs every {p} but `{target}` every {q}; the accessed period must divide the accessing one",
                                    s.name
                                ),
                            ))
                        } else if x != y {
                            Some(Diagnostic::error(
                                Code::AnchorMismatch,
                                acc.span,
                                format!(
                                    "`{}` and `{target}` are periodic with different clock origins (one is counted from its spawn)",
                                    s.name
                                ),
                            ))
                        } else {
                            None
                        }
                    }
                    (PacingType::Event(_), PacingType::Periodic { .. }) | (PacingType::Periodic { .. }, PacingType::Event(_)) => {
                        Some(Diagnostic::error(
                            Code::EventPeriodicAccess,
                            acc.span,
                            format!(
                                "the {} clause of `{}` ({}) synchronously reads `{target}` ({}); mix event-based and periodic streams through `hold` or a window",
                                clause.kind.as_str(),
                                s.name,
                                own.display(spec),
                                theirs.display(spec)
                            ),
                        ))
                    }
                    _ => None,
                };
                diags.extend(diag);
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, resolve};

    fn pacing(src: &str) -> Result<(Spec, Vec<StreamPacing>), Vec<Code>> {
        let spec = resolve(&parse(src).unwrap()).unwrap();
        let p = infer_pacing(&spec).map_err(|d| d.into_iter().map(|d| d.code).collect::<Vec<_>>())?;
        check_accesses(&spec, &p).map_err(|d| d.into_iter().map(|d| d.code).collect::<Vec<_>>())?;
        Ok((spec, p))
    }

    fn eval_of(src: &str, name: &str) -> String {
        let (spec, p) = pacing(src).unwrap();
        let shown = p[spec.lookup(name).unwrap().0].eval.display(&spec).to_string();
        shown
    }

    #[test]
    fn inference() {
        let src = "input a: Int\ninput b: Int\noutput x := a + b\noutput y := x.offset(by: -1).defaults(to: 0) + a";
        assert_eq!(eval_of(src, "x"), "@a && b@");
        assert_eq!(eval_of(src, "y"), "@a && b@");
        assert_eq!(eval_of("input a: Int\noutput s := s.offset(by: -1).defaults(to: 0) + a", "s"), "@a@");
        let p = "input a: Int\noutput x @2s@ := a.hold(or: 0)\noutput y @3s@ := a.hold(or: 0)\noutput z := x + y";
        assert_eq!(eval_of(p, "z"), "@6s@");
    }

    #[test]
    fn rejections() {
        assert_eq!(pacing("output z := 5").unwrap_err(), vec![Code::PacingUnderdetermined]);
        assert_eq!(
            pacing("input a: Int\noutput x @1Hz@ := a.hold(or: 0)\noutput z := x + a").unwrap_err(),
            vec![Code::PacingMix]
        );
        assert_eq!(pacing("input a: Bool\ninput b: Bool\noutput x @a@ := a\noutput y @b@ := x").unwrap_err(), vec![Code::PacingEntailment]);
        assert_eq!(pacing("input a: Int\noutput x @1Hz@ := a").unwrap_err(), vec![Code::EventPeriodicAccess]);
        assert_eq!(
            pacing("input a: Int\noutput x @2s@ := a.hold(or: 0)\noutput y @3s@ := x").unwrap_err(),
            vec![Code::PeriodMismatch]
        );
    }

    #[test]
    fn periodic_containment() {
        assert!(pacing("input a: Int\noutput x @1s@ := a.hold(or: 0)\noutput y @2s@ := x").is_ok());
        assert!(pacing("input a: Int\noutput x @2s@ := a.hold(or: 0)\noutput y @1s@ := x").is_err());
    }

    #[test]
    fn watchdog_close_infers_from_itself() {
        let src = "input e: Bool\ninput c: Bool\noutput timer spawn when e eval @5s@ with true close when timer\ntrigger spawn when e eval @5s@ when !c.hold(or: true) with \"missed\" close when timer";
        let (spec, p) = pacing(src).unwrap();
        let t = &p[spec.lookup("timer").unwrap().0];
        assert_eq!(t.close, Some(PacingType::Periodic { period: Duration::from_secs(5), anchor: Anchor::Spawn }));
        assert_eq!(t.spawn, Some(PacingType::Event(Activation::var(StreamId(0)))));
    }
}
