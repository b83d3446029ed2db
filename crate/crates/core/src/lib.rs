//! Frontend, static analyses and interpreter for a stream-based runtime
//! monitoring language.

pub mod activation;
pub mod analysis;
mod checked;
pub mod diagnostics;
pub mod engine;
pub mod frontend;
pub mod ir;
pub mod registry;
pub mod time;
pub mod trace;
pub mod types;

pub use checked::{check, CheckedSpec};
