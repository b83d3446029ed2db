use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::types::ValueType;

/// A runtime value.
///
/// `Eq`/`Ord` are total (floats compare by `total_cmp`) so values can key
/// instance maps. Expression evaluation uses IEEE comparison instead.
#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(Arc<str>),
    Tuple(Arc<[Value]>),
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn tuple(values: Vec<Value>) -> Value {
        Value::Tuple(Arc::from(values))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(f) => Some(*f),
            Value::Int(i) => Some(*i as f64),
            Value::UInt(u) => Some(*u as f64),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::UInt(_) => 2,
            Value::Float(_) => 3,
            Value::Str(_) => 4,
            Value::Tuple(_) => 5,
        }
    }

    /// Parses a trace cell according to the declared type.
    pub fn parse(text: &str, ty: &ValueType) -> Result<Value, String> {
        let t = text.trim();
        match ty {
            ValueType::Bool => match t.to_ascii_lowercase().as_str() {
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => Err(format!("`{t}` is not a Bool")),
            },
            ValueType::Int => t.parse().map(Value::Int).map_err(|_| format!("`{t}` is not an Int")),
            ValueType::UInt => t.parse().map(Value::UInt).map_err(|_| format!("`{t}` is not a UInt")),
            ValueType::Float => t.parse().map(Value::Float).map_err(|_| format!("`{t}` is not a Float")),
            ValueType::String => Ok(Value::str(text)),
            other => Err(format!("inputs of type {other} cannot be read from a trace")),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::UInt(a), Value::UInt(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Tuple(a), Value::Tuple(b)) => a.iter().cmp(b.iter()),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::UInt(u) => write!(f, "{u}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Str(s) => f.write_str(s),
            Value::Tuple(vs) => {
                f.write_str("(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_order_on_floats() {
        assert_eq!(Value::Float(f64::NAN), Value::Float(f64::NAN));
        assert!(Value::Float(-0.0) < Value::Float(0.0));
    }

    #[test]
    fn parses_cells() {
        assert_eq!(Value::parse("TRUE", &ValueType::Bool).unwrap(), Value::Bool(true));
        assert_eq!(Value::parse(" 3 ", &ValueType::UInt).unwrap(), Value::UInt(3));
        assert!(Value::parse("-3", &ValueType::UInt).is_err());
        assert_eq!(Value::parse("2.5", &ValueType::Float).unwrap(), Value::Float(2.5));
    }

    #[test]
    fn display() {
        assert_eq!(Value::Float(1.0).to_string(), "1.0");
        assert_eq!(Value::tuple(vec![Value::Int(1), Value::str("a")]).to_string(), "(1, a)");
    }
}
