//! Expression evaluation against the current monitor state.

use std::cmp::Ordering;

use crate::frontend::ast::{BinOp, InstanceSelection, Literal, UnOp};
use crate::ir::{Expr, ExprKind, StreamId, StreamRef};
use crate::registry;
use crate::time::Timestamp;
use crate::types::ValueType;

use super::monitor::{Monitor, WindowState};
use super::value::Value;

/// Why an expression produced no value.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Fault {
    /// Arithmetic error; reported as an error verdict.
    Runtime(String),
    /// A stream read failed because that stream failed earlier in the cycle.
    Skip,
    /// A synchronous read found no current value.
    Unavailable(StreamId),
}

pub(crate) struct Ctx<'a> {
    pub params: &'a [Value],
    pub windows: &'a [WindowState],
    pub spawn_time: Timestamp,
}

type Eval = Result<Option<Value>, Fault>;

fn runtime(msg: impl Into<String>) -> Fault {
    Fault::Runtime(msg.into())
}

pub(crate) fn zero_of(t: &ValueType) -> Option<Value> {
    match t {
        ValueType::Int => Some(Value::Int(0)),
        ValueType::UInt => Some(Value::UInt(0)),
        ValueType::Float => Some(Value::Float(0.0)),
        _ => None,
    }
}

impl Monitor {
    pub(crate) fn eval(&self, e: &Expr, ctx: &Ctx<'_>) -> Eval {
        match &e.kind {
            ExprKind::Lit(l) => Ok(Some(match l {
                Literal::Int(n) => match self.checked.types.exprs[e.id.0] {
                    ValueType::UInt => Value::UInt(*n),
                    ValueType::Float => Value::Float(*n as f64),
                    _ => Value::Int(*n as i64),
                },
                Literal::Float(x) => Value::Float(*x),
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Str(s) => Value::str(s),
            })),
            ExprKind::Const(c) => Ok(Some(self.constants[c.0].clone())),
            ExprKind::Param(i) => Ok(Some(ctx.params[*i].clone())),
            ExprKind::Access(r) => {
                let args = self.args(r, ctx)?;
                match self.instance(r.stream, &args) {
                    Some(inst) if inst.fresh == self.cycle => Ok(inst.buffer.front().cloned()),
                    Some(inst) if inst.errored == self.cycle => Err(Fault::Skip),
                    _ => Err(Fault::Unavailable(r.stream)),
                }
            }
            ExprKind::Offset(r, n) => {
                let args = self.args(r, ctx)?;
                Ok(self.instance(r.stream, &args).and_then(|inst| {
                    let fresh = usize::from(inst.fresh == self.cycle);
                    inst.buffer.get(*n as usize - 1 + fresh).cloned()
                }))
            }
            ExprKind::Hold(r, default) => {
                let args = self.args(r, ctx)?;
                match self.instance(r.stream, &args).and_then(|i| i.buffer.front()) {
                    Some(v) => Ok(Some(v.clone())),
                    None => match default {
                        Some(d) => self.eval(d, ctx),
                        None => Ok(None),
                    },
                }
            }
            ExprKind::Defaults(x, d) => match self.eval(x, ctx)? {
                Some(v) => Ok(Some(v)),
                None => self.eval(d, ctx),
            },
            ExprKind::Window {
                duration,
                exact,
                aggregation,
                ..
            } => {
                let now = self.now;
                if *exact && now.since(ctx.spawn_time) < *duration {
                    return Ok(None);
                }
                let w = ctx
                    .windows
                    .iter()
                    .find(|w| w.expr == e.id)
                    .expect("every window expression has state");
                let lo = now.0.checked_sub(duration.0);
                let mut values = w
                    .entries
                    .iter()
                    .filter(|(t, _)| lo.is_none_or(|lo| t.0 > lo) && *t <= now)
                    .map(|(_, v)| v);
                self.fold(aggregation, &mut values, e)
            }
            ExprKind::InstanceAggregate {
                stream,
                selection,
                aggregation,
            } => {
                let cycle = self.cycle;
                let mut values = self.streams[stream.0]
                    .instances
                    .values()
                    .filter(|i| *selection == InstanceSelection::All || i.fresh == cycle)
                    .filter_map(|i| i.buffer.front());
                self.fold(aggregation, &mut values, e)
            }
            ExprKind::Call(name, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval(a, ctx)? {
                        Some(v) => vals.push(v),
                        None => return Ok(None),
                    }
                }
                let f = registry::builtins().get(name).expect("resolved builtin");
                f.apply(&vals).map(Some).map_err(Fault::Runtime)
            }
            ExprKind::Unary(op, x) => {
                let Some(v) = self.eval(x, ctx)? else { return Ok(None) };
                Ok(Some(match (op, v) {
                    (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    (UnOp::Neg, Value::Int(i)) => Value::Int(i.checked_neg().ok_or_else(|| runtime("integer overflow"))?),
                    (UnOp::Neg, Value::UInt(0)) => Value::UInt(0),
                    (UnOp::Neg, Value::UInt(_)) => return Err(runtime("integer overflow: negated a positive UInt")),
                    (UnOp::Neg, Value::Float(f)) => Value::Float(-f),
                    (_, v) => return Err(runtime(format!("invalid operand {v}"))),
                }))
            }
            ExprKind::Binary(BinOp::And, l, r) => match self.eval(l, ctx)? {
                Some(Value::Bool(false)) => Ok(Some(Value::Bool(false))),
                Some(_) => self.eval(r, ctx),
                None => Ok(None),
            },
            ExprKind::Binary(BinOp::Or, l, r) => match self.eval(l, ctx)? {
                Some(Value::Bool(true)) => Ok(Some(Value::Bool(true))),
                Some(_) => self.eval(r, ctx),
                None => Ok(None),
            },
            ExprKind::Binary(op, l, r) => {
                let (Some(a), Some(b)) = (self.eval(l, ctx)?, self.eval(r, ctx)?) else {
                    return Ok(None);
                };
                binary(*op, &a, &b).map(Some)
            }
            ExprKind::Tuple(elems) => {
                let mut vals = Vec::with_capacity(elems.len());
                for x in elems {
                    match self.eval(x, ctx)? {
                        Some(v) => vals.push(v),
                        None => return Ok(None),
                    }
                }
                Ok(Some(Value::tuple(vals)))
            }
            ExprKind::Project(x, i) => Ok(match self.eval(x, ctx)? {
                Some(Value::Tuple(vs)) => vs.get(*i).cloned(),
                _ => None,
            }),
            ExprKind::Format(template, args) => {
                let mut out = String::new();
                let mut pieces = template.split("{}");
                out.push_str(pieces.next().unwrap_or(""));
                for (piece, a) in pieces.zip(args) {
                    match self.eval(a, ctx)? {
                        Some(v) => out.push_str(&v.to_string()),
                        None => out.push('#'),
                    }
                    out.push_str(piece);
                }
                Ok(Some(Value::str(&out)))
            }
        }
    }

    fn args(&self, r: &StreamRef, ctx: &Ctx<'_>) -> Result<Vec<Value>, Fault> {
        let mut out = Vec::with_capacity(r.args.len());
        for a in &r.args {
            match self.eval(a, ctx)? {
                Some(v) => out.push(v),
                None => return Err(runtime("instance argument has no value")),
            }
        }
        Ok(out)
    }

    fn fold(&self, name: &str, values: &mut dyn Iterator<Item = &Value>, e: &Expr) -> Eval {
        let agg = registry::aggregations().get(name).expect("resolved aggregation");
        match agg.fold(values).map_err(Fault::Runtime)? {
            Some(v) => Ok(Some(v)),
            None => Ok(match &self.checked.types.exprs[e.id.0] {
                ValueType::Optional(_) => None,
                t => zero_of(t),
            }),
        }
    }
}

/// IEEE-style comparison: `None` when a NaN is involved.
fn compare(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(y),
        (Value::Tuple(xs), Value::Tuple(ys)) => {
            for (x, y) in xs.iter().zip(ys.iter()) {
                match compare(x, y)? {
                    Ordering::Equal => {}
                    o => return Some(o),
                }
            }
            Some(xs.len().cmp(&ys.len()))
        }
        _ => Some(a.cmp(b)),
    }
}

pub(crate) fn binary(op: BinOp, a: &Value, b: &Value) -> Result<Value, Fault> {
    if op.is_comparison() {
        let o = compare(a, b);
        let r = match op {
            BinOp::Eq => o == Some(Ordering::Equal),
            BinOp::Ne => o != Some(Ordering::Equal),
            BinOp::Lt => o == Some(Ordering::Less),
            BinOp::Le => matches!(o, Some(Ordering::Less | Ordering::Equal)),
            BinOp::Gt => o == Some(Ordering::Greater),
            _ => matches!(o, Some(Ordering::Greater | Ordering::Equal)),
        };
        return Ok(Value::Bool(r));
    }
    let overflow = || runtime(format!("integer overflow in {a} {} {b}", op.symbol()));
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => {
            let (x, y) = (*x, *y);
            if matches!(op, BinOp::Div | BinOp::Rem) && y == 0 {
                return Err(runtime("division by zero"));
            }
            let r = match op {
                BinOp::Add => x.checked_add(y),
                BinOp::Sub => x.checked_sub(y),
                BinOp::Mul => x.checked_mul(y),
                BinOp::Div => x.checked_div(y),
                BinOp::Rem => x.checked_rem(y),
                _ => None,
            };
            r.map(Value::Int).ok_or_else(overflow)
        }
        (Value::UInt(x), Value::UInt(y)) => {
            let (x, y) = (*x, *y);
            if matches!(op, BinOp::Div | BinOp::Rem) && y == 0 {
                return Err(runtime("division by zero"));
            }
            let r = match op {
                BinOp::Add => x.checked_add(y),
                BinOp::Sub => x.checked_sub(y),
                BinOp::Mul => x.checked_mul(y),
                BinOp::Div => x.checked_div(y),
                BinOp::Rem => x.checked_rem(y),
                _ => None,
            };
            r.map(Value::UInt).ok_or_else(overflow)
        }
        (Value::Float(x), Value::Float(y)) => Ok(Value::Float(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => x / y,
            BinOp::Rem => x % y,
            BinOp::Pow => x.powf(*y),
            _ => return Err(runtime(format!("invalid operator {}", op.symbol()))),
        })),
        _ => Err(runtime(format!("invalid operands {a} {} {b}", op.symbol()))),
    }
}
