//! Interpreter: schedules cycles, manages instances and emits verdicts.

mod eval;
mod monitor;
pub mod value;

pub use monitor::{Event, Monitor, MonitorError, Verbosity, Verdict, VerdictKind};
pub use value::Value;
