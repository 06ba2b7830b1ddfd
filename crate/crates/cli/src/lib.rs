//! The descriptor language behind the `propg` binary: abstract syntax,
//! parser, lowering, and the canonical printer.
//!
//! The binary is a thin command dispatcher over this library and the core
//! crate; the language pieces live here so tests can drive them directly.

pub mod ast;
pub mod parse;
pub mod print;
