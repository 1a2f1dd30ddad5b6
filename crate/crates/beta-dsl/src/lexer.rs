//! Tokenizer for `.beta` source text.
//!
//! The lexer is total: unrecognized characters become diagnostics and the
//! scan continues, so the parser always receives a complete token stream
//! ending in `Eof`. `%` starts a comment running to the end of the line.

use unicode_normalization::UnicodeNormalization;

use crate::ast::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Identifier or keyword, NFC-normalized.
    Ident(String),
    /// Numeric literal (integer or float, optional exponent).
    Number(f64),
    /// Quoted string with `\"`, `\\`, and `\n` escapes resolved.
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Equals,
    Arrow,
    Less,
    Eof,
}

impl Tok {
    /// Human-readable name for diagnostics.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Less => "`<`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || unicode_normalization::char::is_combining_mark(c)
}

/// Scans the whole text. Always returns a token list terminated by `Eof`;
/// lexical problems are reported as diagnostics, never as a panic.
pub fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut column = 1usize;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
            }
            c
        }};
    }

    loop {
        let span = Span::new(line, column);
        let c = match chars.peek().copied() {
            Some(c) => c,
            None => break,
        };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while let Some(&n) = chars.peek() {
                if n == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut word = String::new();
            while let Some(&n) = chars.peek() {
                if is_ident_continue(n) {
                    word.push(n);
                    bump!();
                } else {
                    break;
                }
            }
            let word: String = word.nfc().collect();
            tokens.push(Token {
                tok: Tok::Ident(word),
                span,
            });
            continue;
        }
        if c.is_ascii_digit()
            || (c == '-' && {
                let mut ahead = chars.clone();
                ahead.next();
                matches!(ahead.peek(), Some(d) if d.is_ascii_digit() || *d == '.')
            })
        {
            let mut lit = String::new();
            if c == '-' {
                lit.push('-');
                bump!();
            }
            let mut seen_dot = false;
            let mut seen_exp = false;
            while let Some(&n) = chars.peek() {
                if n.is_ascii_digit() {
                    lit.push(n);
                    bump!();
                } else if n == '.' && !seen_dot && !seen_exp {
                    // A dot only joins the number when a digit follows;
                    // `5.` followed by an identifier stays two tokens.
                    let mut ahead = chars.clone();
                    ahead.next();
                    if matches!(ahead.peek(), Some(d) if d.is_ascii_digit()) {
                        seen_dot = true;
                        lit.push(n);
                        bump!();
                    } else {
                        break;
                    }
                } else if (n == 'e' || n == 'E') && !seen_exp {
                    let mut ahead = chars.clone();
                    ahead.next();
                    let next = ahead.peek().copied();
                    let signed = matches!(next, Some('+') | Some('-'));
                    let digit_after = if signed {
                        ahead.next();
                        matches!(ahead.peek(), Some(d) if d.is_ascii_digit())
                    } else {
                        matches!(next, Some(d) if d.is_ascii_digit())
                    };
                    if digit_after {
                        seen_exp = true;
                        lit.push(n);
                        bump!();
                        if signed {
                            lit.push(chars.peek().copied().expect("sign present"));
                            bump!();
                        }
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
            match lit.parse::<f64>() {
                Ok(v) => tokens.push(Token {
                    tok: Tok::Number(v),
                    span,
                }),
                Err(_) => diagnostics.push(Diagnostic::error(
                    format!("malformed number literal `{lit}`"),
                    span,
                )),
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut value = String::new();
            let mut closed = false;
            while let Some(&n) = chars.peek() {
                if n == '"' {
                    bump!();
                    closed = true;
                    break;
                }
                if n == '\n' {
                    break;
                }
                if n == '\\' {
                    bump!();
                    match chars.peek().copied() {
                        Some('"') => {
                            value.push('"');
                            bump!();
                        }
                        Some('\\') => {
                            value.push('\\');
                            bump!();
                        }
                        Some('n') => {
                            value.push('\n');
                            bump!();
                        }
                        Some(other) => {
                            diagnostics.push(Diagnostic::error(
                                format!("unknown escape `\\{other}`"),
                                Span::new(line, column),
                            ));
                            bump!();
                        }
                        None => break,
                    }
                    continue;
                }
                value.push(n);
                bump!();
            }
            if !closed {
                diagnostics.push(Diagnostic::error("unterminated string literal", span));
            }
            tokens.push(Token {
                tok: Tok::Str(value),
                span,
            });
            continue;
        }
        let tok = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            '<' => Some(Tok::Less),
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    tokens.push(Token {
                        tok: Tok::Arrow,
                        span,
                    });
                } else {
                    diagnostics.push(Diagnostic::error(
                        "stray `-` (expected `->` or a number)",
                        span,
                    ));
                }
                continue;
            }
            other => {
                bump!();
                diagnostics.push(Diagnostic::error(
                    format!("unexpected character `{other}`"),
                    span,
                ));
                continue;
            }
        };
        if let Some(tok) = tok {
            bump!();
            tokens.push(Token { tok, span });
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, column),
    });
    (tokens, diagnostics)
}
