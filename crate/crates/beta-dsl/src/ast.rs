//! Syntax tree for `.beta` programs.
//!
//! Every node carries a [`Span`] for diagnostics, but spans compare equal
//! to each other, so `==` on trees is *structural* equality: two parses of
//! differently formatted but equivalent text compare equal.

use serde::Serialize;

/// A 1-based source position. Positions take no part in tree equality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Default for Span {
    fn default() -> Self {
        Self { line: 1, column: 1 }
    }
}

/// How severe a diagnostic is. Errors block resolution; warnings do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message about the source text. The position always lies
/// within the text's line/column bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            line: span.line,
            column: span.column,
        }
    }

    pub fn warning(message: impl Into<String>, span: Span) -> Self {
        Self {
            severity: Severity::Warning,
            message: message.into(),
            line: span.line,
            column: span.column,
        }
    }
}

/// Reference to a local state of one subsystem, written `subsystem.state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRef {
    pub subsystem: String,
    pub state: String,
    pub span: Span,
}

/// One constituent of a `combine(...)` declaration: either a bare
/// `subsystem.state` (which must pin down a single joint configuration)
/// or a parenthesized tuple naming a state for every subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constituent {
    Single(StateRef),
    Tuple(Vec<StateRef>, Span),
}

impl Constituent {
    pub fn span(&self) -> Span {
        match self {
            Constituent::Single(r) => r.span,
            Constituent::Tuple(_, span) => *span,
        }
    }
}

/// `subsystem NAME { states: a, b, ... }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDecl {
    pub name: String,
    pub states: Vec<String>,
    pub span: Span,
}

/// `let NAME = combine(...) [amps(...)]`
#[derive(Debug, Clone, PartialEq)]
pub struct CombineDecl {
    pub name: String,
    pub constituents: Vec<Constituent>,
    pub amplitudes: Option<Vec<f64>>,
    pub span: Span,
}

/// A condition tree over measured slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    /// `any(c1, c2, ...)` — true when any child is true.
    Any(Vec<Cond>, Span),
    /// `all(c1, c2, ...)` — true when every child is true.
    All(Vec<Cond>, Span),
    /// `subsystem.state` — the subsystem was observed in that state.
    State(StateRef),
    /// Bare identifier — a combined variable was observed in its state.
    Combined(String, Span),
    /// `not c` — logical complement.
    Not(Box<Cond>, Span),
}

impl Cond {
    pub fn span(&self) -> Span {
        match self {
            Cond::Any(_, s) | Cond::All(_, s) | Cond::Combined(_, s) | Cond::Not(_, s) => *s,
            Cond::State(r) => r.span,
        }
    }
}

/// One action on the machine state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionDecl {
    /// `set(s.x)` — collapse subsystem `s` onto state `x`.
    SetState(StateRef),
    /// `set(name)` / `set(name, false)` — reassign a combined variable.
    SetCombined {
        name: String,
        truth: bool,
        span: Span,
    },
    /// `swap(s.x, s.y)` — exchange two local states; the one-argument
    /// form `swap(s.x)` exchanges `x` with the other state of a
    /// two-state subsystem.
    Swap {
        first: StateRef,
        second: Option<StateRef>,
        span: Span,
    },
    /// `apply(op, s)` — apply a named built-in operator to subsystem `s`.
    Apply {
        operator: String,
        subsystem: String,
        span: Span,
    },
    /// `print("message")`.
    Print { message: String, span: Span },
}

impl ActionDecl {
    pub fn span(&self) -> Span {
        match self {
            ActionDecl::SetState(r) => r.span,
            ActionDecl::SetCombined { span, .. }
            | ActionDecl::Swap { span, .. }
            | ActionDecl::Apply { span, .. }
            | ActionDecl::Print { span, .. } => *span,
        }
    }
}

/// `if cond -> action, action` or `elif cond -> ...` within a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchDecl {
    pub cond: Cond,
    pub actions: Vec<ActionDecl>,
    pub span: Span,
}

/// `rule NAME { branch+ }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub name: String,
    pub branches: Vec<BranchDecl>,
    pub span: Span,
}

/// `run NAME until entropy < NUM max INT [shots INT] [seed INT]`
#[derive(Debug, Clone, PartialEq)]
pub struct RunDecl {
    pub name: String,
    pub epsilon: f64,
    pub max_steps: u64,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub span: Span,
}

/// A whole parsed program.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ast {
    pub subsystems: Vec<SubsystemDecl>,
    pub combines: Vec<CombineDecl>,
    pub rules: Vec<RuleDecl>,
    pub run: Option<RunDecl>,
}

impl Ast {
    /// True when nothing was declared (e.g. parsing empty text).
    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
            && self.combines.is_empty()
            && self.rules.is_empty()
            && self.run.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_do_not_take_part_in_equality() {
        let a = StateRef {
            subsystem: "s".into(),
            state: "p".into(),
            span: Span::new(1, 1),
        };
        let b = StateRef {
            subsystem: "s".into(),
            state: "p".into(),
            span: Span::new(7, 40),
        };
        assert_eq!(a, b);
        let c = StateRef {
            state: "q".into(),
            ..a.clone()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn empty_ast_reports_empty() {
        assert!(Ast::default().is_empty());
    }
}
