//! Canonical pretty-printer for `.beta` syntax trees.
//!
//! The output is deterministic two-space style; re-parsing it yields a
//! structurally identical tree. Numbers print in Rust's shortest
//! round-trip decimal form, so values survive the loop exactly.

use std::fmt::Write;

use crate::ast::{ActionDecl, Ast, Cond, Constituent, StateRef};

/// Renders a tree in canonical form. The empty tree renders as empty text.
pub fn format(ast: &Ast) -> String {
    let mut out = String::new();
    let mut sections: Vec<String> = Vec::new();

    if !ast.subsystems.is_empty() {
        let mut block = String::from("system {\n");
        for sub in &ast.subsystems {
            let _ = writeln!(block, "  subsystem {} {{", sub.name);
            let _ = writeln!(block, "    states: {}", sub.states.join(", "));
            block.push_str("  }\n");
        }
        block.push('}');
        sections.push(block);
    }

    if !ast.combines.is_empty() {
        let mut block = String::new();
        for (n, decl) in ast.combines.iter().enumerate() {
            if n > 0 {
                block.push('\n');
            }
            let parts: Vec<String> = decl.constituents.iter().map(fmt_constituent).collect();
            let _ = write!(block, "let {} = combine({})", decl.name, parts.join(", "));
            if let Some(amps) = &decl.amplitudes {
                let nums: Vec<String> = amps.iter().map(|v| fmt_num(*v)).collect();
                let _ = write!(block, " amps({})", nums.join(", "));
            }
        }
        sections.push(block);
    }

    for rule in &ast.rules {
        let mut block = String::new();
        let _ = writeln!(block, "rule {} {{", rule.name);
        for (n, branch) in rule.branches.iter().enumerate() {
            let keyword = if n == 0 { "if" } else { "elif" };
            let actions: Vec<String> = branch.actions.iter().map(fmt_action).collect();
            let _ = writeln!(
                block,
                "  {keyword} {} -> {}",
                fmt_cond(&branch.cond),
                actions.join(", ")
            );
        }
        block.push('}');
        sections.push(block);
    }

    if let Some(run) = &ast.run {
        let mut line = format!(
            "run {} until entropy < {} max {}",
            run.name,
            fmt_num(run.epsilon),
            run.max_steps
        );
        if let Some(shots) = run.shots {
            let _ = write!(line, " shots {shots}");
        }
        if let Some(seed) = run.seed {
            let _ = write!(line, " seed {seed}");
        }
        sections.push(line);
    }

    for (n, section) in sections.iter().enumerate() {
        if n > 0 {
            out.push_str("\n\n");
        }
        out.push_str(section);
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn fmt_ref(r: &StateRef) -> String {
    format!("{}.{}", r.subsystem, r.state)
}

fn fmt_constituent(c: &Constituent) -> String {
    match c {
        Constituent::Single(r) => fmt_ref(r),
        Constituent::Tuple(refs, _) => {
            let parts: Vec<String> = refs.iter().map(fmt_ref).collect();
            format!("({})", parts.join(", "))
        }
    }
}

fn fmt_cond(cond: &Cond) -> String {
    match cond {
        Cond::Any(children, _) => {
            let parts: Vec<String> = children.iter().map(fmt_cond).collect();
            format!("any({})", parts.join(", "))
        }
        Cond::All(children, _) => {
            let parts: Vec<String> = children.iter().map(fmt_cond).collect();
            format!("all({})", parts.join(", "))
        }
        Cond::State(r) => fmt_ref(r),
        Cond::Combined(name, _) => name.clone(),
        Cond::Not(inner, _) => format!("not {}", fmt_cond(inner)),
    }
}

fn fmt_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

fn fmt_action(action: &ActionDecl) -> String {
    match action {
        ActionDecl::SetState(r) => format!("set({})", fmt_ref(r)),
        ActionDecl::SetCombined { name, truth, .. } => {
            if *truth {
                format!("set({name})")
            } else {
                format!("set({name}, false)")
            }
        }
        ActionDecl::Swap { first, second, .. } => match second {
            Some(second) => format!("swap({}, {})", fmt_ref(first), fmt_ref(second)),
            None => format!("swap({})", fmt_ref(first)),
        },
        ActionDecl::Apply {
            operator,
            subsystem,
            ..
        } => format!("apply({operator}, {subsystem})"),
        ActionDecl::Print { message, .. } => format!("print({})", fmt_string(message)),
    }
}
