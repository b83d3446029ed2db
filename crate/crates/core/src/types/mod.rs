//! Value, pacing and semantic type checking.

mod infer;
pub mod pacing;
pub mod semantic;
mod value_type;

pub use infer::{infer_value_types, ValueTypes};
pub use pacing::{Anchor, PacingType, StreamPacing};
pub use value_type::ValueType;
