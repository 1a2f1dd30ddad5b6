//! Recursive-descent parser for `.beta` programs.
//!
//! Parsing is total: any input yields an [`Ast`] holding every
//! declaration that could be understood, plus diagnostics for the parts
//! that could not. The parser never aborts the process.

use crate::ast::{
    ActionDecl, Ast, BranchDecl, CombineDecl, Cond, Constituent, Diagnostic, RuleDecl, RunDecl,
    Span, StateRef, SubsystemDecl,
};
use crate::lexer::{lex, Tok, Token};

/// Result of a parse: the recovered tree and everything wrong with it.
/// The tree is trustworthy only when no diagnostic has error severity.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub ast: Ast,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn is_clean(&self) -> bool {
        !self
            .diagnostics
            .iter()
            .any(|d| d.severity == crate::ast::Severity::Error)
    }
}

/// Parses source text into a syntax tree plus diagnostics.
pub fn parse(text: &str) -> ParseOutcome {
    let (tokens, mut diagnostics) = lex(text);
    let mut parser = Parser {
        tokens,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let ast = parser.program();
    diagnostics.extend(parser.diagnostics);
    ParseOutcome { ast, diagnostics }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

const TOP_KEYWORDS: [&str; 4] = ["system", "let", "rule", "run"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek2(&self) -> &Token {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn error(&mut self, message: impl Into<String>, span: Span) {
        self.diagnostics.push(Diagnostic::error(message, span));
    }

    fn expect(&mut self, want: &Tok, context: &str) -> bool {
        if &self.peek().tok == want {
            self.bump();
            true
        } else {
            let found = self.peek().tok.describe();
            let span = self.peek().span;
            self.error(
                format!("expected {} {context}, found {found}", want.describe()),
                span,
            );
            false
        }
    }

    fn expect_word(&mut self, word: &str, context: &str) -> bool {
        if self.at_word(word) {
            self.bump();
            true
        } else {
            let found = self.peek().tok.describe();
            let span = self.peek().span;
            self.error(format!("expected `{word}` {context}, found {found}"), span);
            false
        }
    }

    fn expect_ident(&mut self, context: &str) -> Option<(String, Span)> {
        let span = self.peek().span;
        match self.peek().tok.clone() {
            Tok::Ident(w) => {
                self.bump();
                Some((w, span))
            }
            other => {
                self.error(
                    format!("expected an identifier {context}, found {}", other.describe()),
                    span,
                );
                None
            }
        }
    }

    fn expect_number(&mut self, context: &str) -> Option<(f64, Span)> {
        let span = self.peek().span;
        match self.peek().tok {
            Tok::Number(v) => {
                self.bump();
                Some((v, span))
            }
            ref other => {
                let msg = format!("expected a number {context}, found {}", other.describe());
                self.error(msg, span);
                None
            }
        }
    }

    fn expect_int(&mut self, context: &str) -> Option<(u64, Span)> {
        let (v, span) = self.expect_number(context)?;
        if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
            self.error(
                format!("expected a nonnegative integer {context}, found {v}"),
                span,
            );
            return None;
        }
        Some((v as u64, span))
    }

    /// Skips tokens until a top-level keyword, a closing brace, or the end
    /// of input. Every caller consumes (or breaks on) all of those sync
    /// tokens, so the parse always makes progress.
    fn recover_to_top(&mut self) {
        loop {
            match &self.peek().tok {
                Tok::Eof | Tok::RBrace => break,
                Tok::Ident(w) if TOP_KEYWORDS.contains(&w.as_str()) => break,
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skips until a branch boundary inside a rule body.
    fn recover_in_rule(&mut self) {
        loop {
            match &self.peek().tok {
                Tok::Eof | Tok::RBrace => break,
                Tok::Ident(w) if w == "if" || w == "elif" || w == "rule" || w == "run" => break,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn program(&mut self) -> Ast {
        let mut ast = Ast::default();
        while !self.at_eof() {
            let span = self.peek().span;
            match self.peek().tok.clone() {
                Tok::Ident(w) if w == "system" => {
                    self.bump();
                    self.system_block(&mut ast);
                }
                Tok::Ident(w) if w == "let" => {
                    self.bump();
                    if let Some(decl) = self.combine_decl(span) {
                        ast.combines.push(decl);
                    }
                }
                Tok::Ident(w) if w == "rule" => {
                    self.bump();
                    if let Some(rule) = self.rule_decl(span) {
                        ast.rules.push(rule);
                    }
                }
                Tok::Ident(w) if w == "run" => {
                    self.bump();
                    if let Some(run) = self.run_stmt(span) {
                        if ast.run.is_some() {
                            self.error("duplicate `run` statement (only one is allowed)", span);
                        } else {
                            ast.run = Some(run);
                        }
                    }
                }
                other => {
                    self.error(
                        format!(
                            "expected `system`, `let`, `rule`, or `run`, found {}",
                            other.describe()
                        ),
                        span,
                    );
                    self.recover_to_top();
                    // A stray closing brace at top level would stall
                    // recovery, so consume it here.
                    if self.peek().tok == Tok::RBrace {
                        self.bump();
                    }
                }
            }
        }
        ast
    }

    fn system_block(&mut self, ast: &mut Ast) {
        if !self.expect(&Tok::LBrace, "after `system`") {
            self.recover_to_top();
            return;
        }
        let mut any = false;
        loop {
            if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            }
            if self.at_eof() {
                let span = self.peek().span;
                self.error("unclosed `system` block", span);
                break;
            }
            let span = self.peek().span;
            if self.at_word("subsystem") {
                self.bump();
                if let Some(sub) = self.subsystem_decl(span) {
                    ast.subsystems.push(sub);
                    any = true;
                }
            } else {
                let found = self.peek().tok.describe();
                self.error(format!("expected `subsystem`, found {found}"), span);
                self.recover_to_top();
                if !self.at_word("subsystem") {
                    break;
                }
            }
        }
        if !any {
            let span = self.peek().span;
            self.error("`system` block declares no subsystems", span);
        }
    }

    fn subsystem_decl(&mut self, span: Span) -> Option<SubsystemDecl> {
        let (name, _) = match self.expect_ident("after `subsystem`") {
            Some(v) => v,
            None => {
                self.recover_to_top();
                return None;
            }
        };
        if !self.expect(&Tok::LBrace, "after the subsystem name") {
            self.recover_to_top();
            return None;
        }
        if !self.expect_word("states", "inside the subsystem") {
            self.recover_to_top();
            return None;
        }
        if !self.expect(&Tok::Colon, "after `states`") {
            self.recover_to_top();
            return None;
        }
        let mut states = Vec::new();
        loop {
            match self.expect_ident("as a state name") {
                Some((s, _)) => states.push(s),
                None => {
                    self.recover_to_top();
                    return None;
                }
            }
            if self.peek().tok == Tok::Comma {
                self.bump();
                continue;
            }
            break;
        }
        if states.len() < 2 {
            self.error(
                format!("subsystem `{name}` needs at least two states, has {}", states.len()),
                span,
            );
        }
        self.expect(&Tok::RBrace, "to close the subsystem");
        Some(SubsystemDecl { name, states, span })
    }

    fn state_ref(&mut self, context: &str) -> Option<StateRef> {
        let (subsystem, span) = self.expect_ident(context)?;
        if !self.expect(&Tok::Dot, "between subsystem and state") {
            return None;
        }
        let (state, _) = self.expect_ident("as the state name")?;
        Some(StateRef {
            subsystem,
            state,
            span,
        })
    }

    fn constituent(&mut self) -> Option<Constituent> {
        if self.peek().tok == Tok::LParen {
            let span = self.peek().span;
            self.bump();
            let mut refs = Vec::new();
            loop {
                refs.push(self.state_ref("inside the joint tuple")?);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                    continue;
                }
                break;
            }
            if !self.expect(&Tok::RParen, "to close the joint tuple") {
                return None;
            }
            Some(Constituent::Tuple(refs, span))
        } else {
            self.state_ref("as a combine constituent").map(Constituent::Single)
        }
    }

    fn combine_decl(&mut self, span: Span) -> Option<CombineDecl> {
        let outcome = (|| {
            let (name, _) = self.expect_ident("after `let`")?;
            if !self.expect(&Tok::Equals, "after the name") {
                return None;
            }
            if !self.expect_word("combine", "after `=`") {
                return None;
            }
            if !self.expect(&Tok::LParen, "after `combine`") {
                return None;
            }
            let mut constituents = Vec::new();
            loop {
                constituents.push(self.constituent()?);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                    continue;
                }
                break;
            }
            if !self.expect(&Tok::RParen, "to close `combine(...)`") {
                return None;
            }
            if constituents.len() < 2 {
                self.error(
                    format!("`combine` needs at least two constituents, has {}", constituents.len()),
                    span,
                );
            }
            let mut amplitudes = None;
            if self.at_word("amps") {
                self.bump();
                if !self.expect(&Tok::LParen, "after `amps`") {
                    return None;
                }
                let mut values = Vec::new();
                loop {
                    let (v, _) = self.expect_number("as an amplitude")?;
                    values.push(v);
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                        continue;
                    }
                    break;
                }
                if !self.expect(&Tok::RParen, "to close `amps(...)`") {
                    return None;
                }
                amplitudes = Some(values);
            }
            Some(CombineDecl {
                name,
                constituents,
                amplitudes,
                span,
            })
        })();
        if outcome.is_none() {
            self.recover_to_top();
        }
        outcome
    }

    fn cond(&mut self) -> Option<Cond> {
        let span = self.peek().span;
        match self.peek().tok.clone() {
            Tok::Ident(w) if w == "any" && self.peek2().tok == Tok::LParen => {
                self.bump();
                self.bump();
                let children = self.cond_list()?;
                Some(Cond::Any(children, span))
            }
            Tok::Ident(w) if w == "all" && self.peek2().tok == Tok::LParen => {
                self.bump();
                self.bump();
                let children = self.cond_list()?;
                Some(Cond::All(children, span))
            }
            Tok::Ident(w) if w == "not" => {
                self.bump();
                let inner = self.cond()?;
                Some(Cond::Not(Box::new(inner), span))
            }
            Tok::Ident(w) => {
                if self.peek2().tok == Tok::Dot {
                    self.state_ref("as a condition").map(Cond::State)
                } else {
                    self.bump();
                    Some(Cond::Combined(w, span))
                }
            }
            other => {
                self.error(
                    format!("expected a condition, found {}", other.describe()),
                    span,
                );
                None
            }
        }
    }

    fn cond_list(&mut self) -> Option<Vec<Cond>> {
        let mut children = Vec::new();
        loop {
            children.push(self.cond()?);
            if self.peek().tok == Tok::Comma {
                self.bump();
                continue;
            }
            break;
        }
        if !self.expect(&Tok::RParen, "to close the condition list") {
            return None;
        }
        Some(children)
    }

    fn action(&mut self) -> Option<ActionDecl> {
        let span = self.peek().span;
        let (word, _) = self.expect_ident("as an action (`set`, `swap`, `apply`, `print`)")?;
        match word.as_str() {
            "set" => {
                if !self.expect(&Tok::LParen, "after `set`") {
                    return None;
                }
                let (target, _) = self.expect_ident("inside `set(...)`")?;
                if self.peek().tok == Tok::Dot {
                    self.bump();
                    let (state, _) = self.expect_ident("as the state name")?;
                    if !self.expect(&Tok::RParen, "to close `set(...)`") {
                        return None;
                    }
                    Some(ActionDecl::SetState(StateRef {
                        subsystem: target,
                        state,
                        span,
                    }))
                } else {
                    let mut truth = true;
                    if self.peek().tok == Tok::Comma {
                        self.bump();
                        let (word, wspan) = self.expect_ident("as `true` or `false`")?;
                        match word.as_str() {
                            "true" => truth = true,
                            "false" => truth = false,
                            other => {
                                self.error(
                                    format!("expected `true` or `false`, found `{other}`"),
                                    wspan,
                                );
                                return None;
                            }
                        }
                    }
                    if !self.expect(&Tok::RParen, "to close `set(...)`") {
                        return None;
                    }
                    Some(ActionDecl::SetCombined {
                        name: target,
                        truth,
                        span,
                    })
                }
            }
            "swap" => {
                if !self.expect(&Tok::LParen, "after `swap`") {
                    return None;
                }
                let first = self.state_ref("inside `swap(...)`")?;
                let mut second = None;
                if self.peek().tok == Tok::Comma {
                    self.bump();
                    second = Some(self.state_ref("as the swap partner")?);
                }
                if !self.expect(&Tok::RParen, "to close `swap(...)`") {
                    return None;
                }
                Some(ActionDecl::Swap {
                    first,
                    second,
                    span,
                })
            }
            "apply" => {
                if !self.expect(&Tok::LParen, "after `apply`") {
                    return None;
                }
                let (operator, _) = self.expect_ident("as the operator name")?;
                if !self.expect(&Tok::Comma, "between operator and subsystem") {
                    return None;
                }
                let (subsystem, _) = self.expect_ident("as the subsystem name")?;
                if !self.expect(&Tok::RParen, "to close `apply(...)`") {
                    return None;
                }
                Some(ActionDecl::Apply {
                    operator,
                    subsystem,
                    span,
                })
            }
            "print" => {
                if !self.expect(&Tok::LParen, "after `print`") {
                    return None;
                }
                let message = match self.peek().tok.clone() {
                    Tok::Str(s) => {
                        self.bump();
                        s
                    }
                    other => {
                        let span = self.peek().span;
                        self.error(
                            format!("expected a string literal, found {}", other.describe()),
                            span,
                        );
                        return None;
                    }
                };
                if !self.expect(&Tok::RParen, "to close `print(...)`") {
                    return None;
                }
                Some(ActionDecl::Print { message, span })
            }
            other => {
                self.error(
                    format!("unknown action `{other}` (expected `set`, `swap`, `apply`, or `print`)"),
                    span,
                );
                None
            }
        }
    }

    fn rule_decl(&mut self, span: Span) -> Option<RuleDecl> {
        let (name, _) = match self.expect_ident("after `rule`") {
            Some(v) => v,
            None => {
                self.recover_to_top();
                return None;
            }
        };
        if !self.expect(&Tok::LBrace, "after the rule name") {
            self.recover_to_top();
            return None;
        }
        let mut branches = Vec::new();
        loop {
            if self.peek().tok == Tok::RBrace {
                self.bump();
                break;
            }
            if self.at_eof() {
                let span = self.peek().span;
                self.error(format!("unclosed body of rule `{name}`"), span);
                break;
            }
            let bspan = self.peek().span;
            let keyword = match self.peek().tok.clone() {
                Tok::Ident(w) if w == "if" || w == "elif" => {
                    self.bump();
                    w
                }
                // A following declaration means the body's `}` is missing.
                Tok::Ident(w) if w == "rule" || w == "run" || w == "system" || w == "let" => {
                    self.error(format!("unclosed body of rule `{name}`"), bspan);
                    break;
                }
                other => {
                    self.error(
                        format!("expected `if` or `elif`, found {}", other.describe()),
                        bspan,
                    );
                    self.recover_in_rule();
                    continue;
                }
            };
            if branches.is_empty() && keyword == "elif" {
                self.error("the first branch of a rule must use `if`", bspan);
            }
            let branch = (|this: &mut Self| {
                let cond = this.cond()?;
                if !this.expect(&Tok::Arrow, "between condition and actions") {
                    return None;
                }
                let mut actions = Vec::new();
                loop {
                    actions.push(this.action()?);
                    if this.peek().tok == Tok::Comma {
                        this.bump();
                        continue;
                    }
                    break;
                }
                Some(BranchDecl {
                    cond,
                    actions,
                    span: bspan,
                })
            })(self);
            match branch {
                Some(b) => branches.push(b),
                None => self.recover_in_rule(),
            }
        }
        if branches.is_empty() {
            self.error(format!("rule `{name}` has no branches"), span);
        }
        Some(RuleDecl {
            name,
            branches,
            span,
        })
    }

    fn run_stmt(&mut self, span: Span) -> Option<RunDecl> {
        let outcome = (|| {
            let (name, _) = self.expect_ident("after `run`")?;
            if !self.expect_word("until", "after the program label") {
                return None;
            }
            if !self.expect_word("entropy", "after `until`") {
                return None;
            }
            if !self.expect(&Tok::Less, "after `entropy`") {
                return None;
            }
            let (epsilon, _) = self.expect_number("as the entropy threshold")?;
            if !self.expect_word("max", "after the threshold") {
                return None;
            }
            let (max_steps, _) = self.expect_int("as the step bound")?;
            let mut shots = None;
            let mut seed = None;
            if self.at_word("shots") {
                self.bump();
                shots = Some(self.expect_int("after `shots`")?.0);
            }
            if self.at_word("seed") {
                self.bump();
                seed = Some(self.expect_int("after `seed`")?.0);
            }
            Some(RunDecl {
                name,
                epsilon,
                max_steps,
                shots,
                seed,
                span,
            })
        })();
        if outcome.is_none() {
            self.recover_to_top();
        }
        outcome
    }
}
