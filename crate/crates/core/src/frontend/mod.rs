//! Lexing, parsing, pretty-printing and name resolution.

pub mod ast;
pub mod lexer;
mod parser;
mod printer;
pub mod resolve;

pub use parser::parse;
pub use resolve::resolve;
