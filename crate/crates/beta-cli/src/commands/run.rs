//! `beta run <path>`: the full program pipeline, parse through convergence.

use std::path::Path;

use beta_core::machine::{run_until_converged, Mode, RunReport};
use beta_dsl::{parse, resolve, Diagnostic};

use crate::{fail, Emit, EXIT_DIAGNOSTICS, EXIT_INTERNAL, EXIT_USAGE};

/// Command-line settings that take precedence over the program's own run
/// clause. A seed forces sampled mode; the other fields replace the
/// corresponding configuration entries.
pub struct Overrides {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub max_steps: Option<u64>,
}

pub fn cmd_run(path: &Path, overrides: Overrides, emit: &Emit) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(&format!("cannot read {}: {e}", path.display()), EXIT_USAGE),
    };

    let parsed = parse(&text);
    print_diagnostics(path, &parsed.diagnostics);
    if !parsed.is_clean() {
        return EXIT_DIAGNOSTICS;
    }

    let mut bound = match resolve(&parsed.ast) {
        Ok(b) => b,
        Err(diags) => {
            print_diagnostics(path, &diags);
            return EXIT_DIAGNOSTICS;
        }
    };

    if let Some(shots) = overrides.shots {
        bound.config.shots = shots;
    }
    if let Some(eps) = overrides.epsilon {
        bound.config.epsilon = eps;
    }
    if let Some(steps) = overrides.max_steps {
        bound.config.max_steps = steps;
    }
    if let Some(seed) = overrides.seed {
        bound.config.mode = Mode::Sampled { seed };
    }

    let outcome = match run_until_converged(bound.program, bound.state, bound.config) {
        Ok(o) => o,
        Err(e @ beta_core::Error::Numeric(_)) => return fail(&e.to_string(), EXIT_INTERNAL),
        Err(e) => return fail(&e.to_string(), EXIT_DIAGNOSTICS),
    };

    emit.finish(&outcome.report, &render(&outcome.report))
}

fn print_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        let severity = match d.severity {
            beta_dsl::Severity::Error => "error",
            beta_dsl::Severity::Warning => "warning",
        };
        eprintln!(
            "{}:{}:{}: {severity}: {}",
            path.display(),
            d.line,
            d.column,
            d.message
        );
    }
}

fn render(report: &RunReport) -> String {
    let mut lines = Vec::new();
    lines.push(format!(
        "program {} (digest {})",
        report.program_name, report.program_digest
    ));
    let mode = match report.mode {
        Mode::Exact => "exact".to_string(),
        Mode::Sampled { seed } => format!("sampled (seed {seed})"),
    };
    lines.push(format!(
        "mode {mode}, shots {}, epsilon {}, max steps {}",
        report.shots, report.epsilon, report.max_steps
    ));
    lines.push(format!(
        "steps executed: {}; converged: {}{}{}",
        report.steps.len(),
        report.converged,
        report
            .depth
            .map(|d| format!(" at depth {d}"))
            .unwrap_or_default(),
        report
            .decided_class
            .as_ref()
            .map(|c| format!("; decided class {c}"))
            .unwrap_or_default(),
    ));
    if report.branches_fired.is_empty() {
        lines.push("branches fired: (none)".to_string());
    } else {
        lines.push(format!("branches fired: {}", report.branches_fired.join(", ")));
    }
    let prints: Vec<&str> = report
        .steps
        .iter()
        .flat_map(|s| s.prints.iter().map(String::as_str))
        .collect();
    if !prints.is_empty() {
        lines.push("printed:".to_string());
        for p in prints {
            lines.push(format!("  {p}"));
        }
    }
    let trace: Vec<String> = report.entropy_trace.iter().map(|e| format!("{e:.6}")).collect();
    lines.push(format!("entropy trace: [{}]", trace.join(", ")));
    lines.join("\n")
}
