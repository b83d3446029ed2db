use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueType {
    Int,
    UInt,
    Float,
    Bool,
    String,
    Tuple(Vec<ValueType>),
    Optional(Box<ValueType>),
}

impl ValueType {
    /// Wraps in `Optional` unless already optional.
    pub fn optional(inner: ValueType) -> ValueType {
        match inner {
            ValueType::Optional(_) => inner,
            other => ValueType::Optional(Box::new(other)),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ValueType::Int | ValueType::UInt | ValueType::Float)
    }

    pub fn from_name(name: &str) -> Option<ValueType> {
        Some(match name {
            "Int" | "Int64" => ValueType::Int,
            "UInt" | "UInt64" => ValueType::UInt,
            "Float" | "Float64" => ValueType::Float,
            "Bool" => ValueType::Bool,
            "String" => ValueType::String,
            _ => return None,
        })
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Int => f.write_str("Int"),
            ValueType::UInt => f.write_str("UInt"),
            ValueType::Float => f.write_str("Float"),
            ValueType::Bool => f.write_str("Bool"),
            ValueType::String => f.write_str("String"),
            ValueType::Tuple(elems) => {
                f.write_str("(")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            ValueType::Optional(inner) => write!(f, "{inner}?"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optional_does_not_nest() {
        let t = ValueType::optional(ValueType::optional(ValueType::Int));
        assert_eq!(t, ValueType::Optional(Box::new(ValueType::Int)));
        assert_eq!(t.to_string(), "Int?");
    }
}
