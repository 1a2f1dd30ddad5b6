//! Front end for the `.beta` modeling language.
//!
//! A `.beta` program declares a composite system of labeled subsystems,
//! optional combined states over joint configurations, measurement-gated
//! rules, and a run directive. This crate turns source text into a bound
//! program for the simulation core:
//!
//! - [`parse`] — total recursive-descent parsing with positioned
//!   diagnostics,
//! - [`resolve`] — name binding and lowering onto the core's system,
//!   gate, and action types,
//! - [`execute`] / [`run_source`] — stepping the machine to entropy
//!   convergence,
//! - [`format`] — the canonical pretty-printer (structural round-trip).

pub mod ast;
pub mod format;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod resolver;

pub use ast::{Ast, Diagnostic, Severity, Span};
pub use format::format;
pub use interp::{execute, run_source};
pub use parser::{parse, ParseOutcome};
pub use resolver::{resolve, BoundProgram};
