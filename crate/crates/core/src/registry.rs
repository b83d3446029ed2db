//! Named strategies for aggregation functions and `math` builtins.
//!
//! Both are trait objects looked up by name at resolution time; the type
//! checker reads their signatures and the engine calls them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::engine::value::Value;
use crate::types::ValueType;

/// How an aggregation's result type depends on the aggregated type.
#[derive(Clone, Debug, PartialEq)]
pub enum AggSignature {
    /// Any input, fixed output.
    AnyTo(ValueType),
    /// Numeric input, same output type.
    NumericSame,
    /// Numeric input, Float output.
    NumericToFloat,
    /// Bool input, Bool output.
    BoolSame,
}

pub trait Aggregation: Send + Sync {
    fn name(&self) -> &'static str;
    fn signature(&self) -> AggSignature;
    /// Whether the empty aggregate is undefined (and the result optional).
    fn empty_is_none(&self) -> bool;
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinSignature {
    FloatToFloat,
    /// All arguments and the result share one numeric type.
    NumericSame,
}

pub trait Builtin: Send + Sync {
    fn name(&self) -> &'static str;
    fn arity(&self) -> usize;
    fn signature(&self) -> BuiltinSignature;
    fn apply(&self, args: &[Value]) -> Result<Value, String>;
}

pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn insert(&mut self, name: &'static str, item: Box<T>) {
        self.entries.insert(name, item);
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.get(name).map(|b| &**b)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl Registry<dyn Aggregation> {
    pub fn register(&mut self, agg: Box<dyn Aggregation>) {
        self.insert(agg.name(), agg);
    }
}

impl Registry<dyn Builtin> {
    pub fn register(&mut self, f: Box<dyn Builtin>) {
        self.insert(f.name(), f);
    }
}

pub fn aggregations() -> &'static Registry<dyn Aggregation> {
    static REG: OnceLock<Registry<dyn Aggregation>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Aggregation> = Registry::default();
        r.register(Box::new(Count));
        r.register(Box::new(Sum));
        r.register(Box::new(Avg));
        r.register(Box::new(Extremum { name: "min", keep: std::cmp::Ordering::Less }));
        r.register(Box::new(Extremum { name: "max", keep: std::cmp::Ordering::Greater }));
        r.register(Box::new(Quantifier { name: "exists", unit: false }));
        r.register(Box::new(Quantifier { name: "forall", unit: true }));
        r
    })
}

pub fn builtins() -> &'static Registry<dyn Builtin> {
    static REG: OnceLock<Registry<dyn Builtin>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Builtin> = Registry::default();
        r.register(Box::new(FloatFn { name: "sqrt", f: f64::sqrt }));
        r.register(Box::new(FloatFn { name: "sin", f: f64::sin }));
        r.register(Box::new(FloatFn { name: "cos", f: f64::cos }));
        r.register(Box::new(Abs));
        r.register(Box::new(MinMax { name: "min", want_max: false }));
        r.register(Box::new(MinMax { name: "max", want_max: true }));
        r
    })
}

struct Count;

impl Aggregation for Count {
    fn name(&self) -> &'static str {
        "count"
    }
    fn signature(&self) -> AggSignature {
        AggSignature::AnyTo(ValueType::UInt)
    }
    fn empty_is_none(&self) -> bool {
        false
    }
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
        Ok(Some(Value::UInt(values.count() as u64)))
    }
}

/// Checked sum; `None` for an empty input.
fn add_all(values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
    let mut acc: Option<Value> = None;
    for v in values {
        acc = Some(match acc {
            None => v.clone(),
            Some(a) => add(&a, v)?,
        });
    }
    Ok(acc)
}

fn add(a: &Value, b: &Value) -> Result<Value, String> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.checked_add(*y).map(Value::Int).ok_or_else(|| "Int overflow in sum".to_string()),
        (Value::UInt(x), Value::UInt(y)) => x.checked_add(*y).map(Value::UInt).ok_or_else(|| "UInt overflow in sum".to_string()),
        (Value::Float(x), Value::Float(y)) => Ok(Value::Float(x + y)),
        _ => Err(format!("cannot add {a} and {b}")),
    }
}

struct Sum;

impl Aggregation for Sum {
    fn name(&self) -> &'static str {
        "sum"
    }
    fn signature(&self) -> AggSignature {
        AggSignature::NumericSame
    }
    fn empty_is_none(&self) -> bool {
        false
    }
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
        let mut values = values.peekable();
        let zero = match values.peek() {
            None => return Ok(None),
            Some(Value::Int(_)) => Value::Int(0),
            Some(Value::UInt(_)) => Value::UInt(0),
            Some(_) => Value::Float(0.0),
        };
        Ok(Some(add_all(&mut values)?.unwrap_or(zero)))
    }
}

struct Avg;

impl Aggregation for Avg {
    fn name(&self) -> &'static str {
        "avg"
    }
    fn signature(&self) -> AggSignature {
        AggSignature::NumericToFloat
    }
    fn empty_is_none(&self) -> bool {
        true
    }
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
        let (mut n, mut total) = (0u64, 0.0f64);
        for v in values {
            n += 1;
            total += v.as_f64().ok_or_else(|| format!("cannot average {v}"))?;
        }
        Ok((n > 0).then(|| Value::Float(total / n as f64)))
    }
}

struct Extremum {
    name: &'static str,
    keep: std::cmp::Ordering,
}

impl Aggregation for Extremum {
    fn name(&self) -> &'static str {
        self.name
    }
    fn signature(&self) -> AggSignature {
        AggSignature::NumericSame
    }
    fn empty_is_none(&self) -> bool {
        true
    }
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
        let mut best: Option<&Value> = None;
        for v in values {
            best = match best {
                Some(b) if numeric_cmp(v, b) != Some(self.keep) => Some(b),
                _ => Some(v),
            };
        }
        Ok(best.cloned())
    }
}

/// IEEE ordering; NaN never replaces the current extremum.
fn numeric_cmp(a: &Value, b: &Value) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::UInt(x), Value::UInt(y)) => Some(x.cmp(y)),
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(y),
        _ => None,
    }
}

struct Quantifier {
    name: &'static str,
    /// Result on the empty set; `forall` is true, `exists` false.
    unit: bool,
}

impl Aggregation for Quantifier {
    fn name(&self) -> &'static str {
        self.name
    }
    fn signature(&self) -> AggSignature {
        AggSignature::BoolSame
    }
    fn empty_is_none(&self) -> bool {
        false
    }
    fn fold(&self, values: &mut dyn Iterator<Item = &Value>) -> Result<Option<Value>, String> {
        let mut acc = self.unit;
        for v in values {
            let b = v.as_bool().ok_or_else(|| format!("`{}` needs Bool values", self.name))?;
            if b != self.unit {
                acc = b;
            }
        }
        Ok(Some(Value::Bool(acc)))
    }
}

struct FloatFn {
    name: &'static str,
    f: fn(f64) -> f64,
}

impl Builtin for FloatFn {
    fn name(&self) -> &'static str {
        self.name
    }
    fn arity(&self) -> usize {
        1
    }
    fn signature(&self) -> BuiltinSignature {
        BuiltinSignature::FloatToFloat
    }
    fn apply(&self, args: &[Value]) -> Result<Value, String> {
        match args {
            [Value::Float(x)] => Ok(Value::Float((self.f)(*x))),
            _ => Err(format!("{} expects one Float", self.name)),
        }
    }
}

struct Abs;

impl Builtin for Abs {
    fn name(&self) -> &'static str {
        "abs"
    }
    fn arity(&self) -> usize {
        1
    }
    fn signature(&self) -> BuiltinSignature {
        BuiltinSignature::NumericSame
    }
    fn apply(&self, args: &[Value]) -> Result<Value, String> {
        match args {
            [Value::Float(x)] => Ok(Value::Float(x.abs())),
            [Value::Int(x)] => x.checked_abs().map(Value::Int).ok_or_else(|| "Int overflow in abs".into()),
            [Value::UInt(x)] => Ok(Value::UInt(*x)),
            _ => Err("abs expects one number".into()),
        }
    }
}

struct MinMax {
    name: &'static str,
    want_max: bool,
}

impl Builtin for MinMax {
    fn name(&self) -> &'static str {
        self.name
    }
    fn arity(&self) -> usize {
        2
    }
    fn signature(&self) -> BuiltinSignature {
        BuiltinSignature::NumericSame
    }
    fn apply(&self, args: &[Value]) -> Result<Value, String> {
        match args {
            [Value::Float(a), Value::Float(b)] => Ok(Value::Float(if self.want_max { a.max(*b) } else { a.min(*b) })),
            [a, b] => {
                let ord = numeric_cmp(a, b).ok_or_else(|| format!("{} expects two numbers of one type", self.name))?;
                let take_a = if self.want_max { ord.is_ge() } else { ord.is_le() };
                Ok(if take_a { a.clone() } else { b.clone() })
            }
            _ => Err(format!("{} expects two arguments", self.name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fold(name: &str, vals: &[Value]) -> Option<Value> {
        aggregations().get(name).unwrap().fold(&mut vals.iter()).unwrap()
    }

    #[test]
    fn neutral_elements() {
        assert_eq!(fold("count", &[]), Some(Value::UInt(0)));
        assert_eq!(fold("exists", &[]), Some(Value::Bool(false)));
        assert_eq!(fold("forall", &[]), Some(Value::Bool(true)));
        assert_eq!(fold("avg", &[]), None);
        assert_eq!(fold("min", &[]), None);
        assert_eq!(fold("max", &[]), None);
    }

    #[test]
    fn folds() {
        let v = [Value::Int(2), Value::Int(5), Value::Int(9)];
        assert_eq!(fold("max", &v), Some(Value::Int(9)));
        assert_eq!(fold("min", &v), Some(Value::Int(2)));
        assert_eq!(fold("sum", &v), Some(Value::Int(16)));
        assert_eq!(fold("count", &v), Some(Value::UInt(3)));
        let b = [Value::Bool(false), Value::Bool(true)];
        assert_eq!(fold("exists", &b), Some(Value::Bool(true)));
        assert_eq!(fold("forall", &b), Some(Value::Bool(false)));
        assert_eq!(fold("avg", &[Value::Float(1.0), Value::Float(2.0)]), Some(Value::Float(1.5)));
    }

    #[test]
    fn sum_overflow_is_an_error() {
        let v = [Value::Int(i64::MAX), Value::Int(1)];
        assert!(aggregations().get("sum").unwrap().fold(&mut v.iter()).is_err());
    }

    #[test]
    fn builtin_lookup() {
        let names: Vec<_> = builtins().names().collect();
        assert_eq!(names, ["abs", "cos", "max", "min", "sin", "sqrt"]);
        assert_eq!(builtins().get("sqrt").unwrap().apply(&[Value::Float(4.0)]).unwrap(), Value::Float(2.0));
        assert_eq!(builtins().get("max").unwrap().apply(&[Value::Int(3), Value::Int(7)]).unwrap(), Value::Int(7));
    }
}
