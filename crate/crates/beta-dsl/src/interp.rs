//! Executes bound programs on the simulation core.

use beta_core::machine::{run_until_converged, RunOutcome};

use crate::ast::{Diagnostic, Span};
use crate::parser::parse;
use crate::resolver::{resolve, BoundProgram};

/// Runs a bound program to convergence (or its step bound). Runtime
/// failures surface as diagnostics so front ends can report them
/// uniformly with syntax and binding problems.
pub fn execute(bound: BoundProgram) -> Result<RunOutcome, Vec<Diagnostic>> {
    run_until_converged(bound.program, bound.state, bound.config).map_err(|e| {
        vec![Diagnostic::error(
            format!("runtime failure: {e}"),
            Span::default(),
        )]
    })
}

/// Front-to-back convenience: parse, resolve, and execute source text.
pub fn run_source(text: &str) -> Result<RunOutcome, Vec<Diagnostic>> {
    let parsed = parse(text);
    if !parsed.is_clean() {
        return Err(parsed.diagnostics);
    }
    let bound = resolve(&parsed.ast)?;
    execute(bound)
}
