//! Tokenizer for the control-problem DSL. Total: unexpected characters
//! become error diagnostics, never panics. Comments run from `//` to end of
//! line; whitespace is insignificant.

use super::{Diagnostic, Severity, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum TokenKind {
    Ident,
    LBrace,
    RBrace,
    Dot,
    Colon,
    Dash,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is_kw(&self, kw: &str) -> bool {
        self.kind == TokenKind::Ident && self.text == kw
    }
}

pub(super) const RESERVED: [&str; 12] = [
    "plant",
    "states",
    "marked",
    "initial",
    "controllable",
    "uncontrollable",
    "trans",
    "requirement",
    "needs",
    "or",
    "and",
    "not",
];

pub(super) fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(b)
    }

    fn here(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.column)
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Tokenizes `src`. The returned stream always ends with an `Eof` token
/// spanning the end of input.
pub(super) fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut s = Scanner { bytes: src.as_bytes(), pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();

    loop {
        // Skip whitespace and comments.
        loop {
            match s.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    s.bump();
                }
                Some(b'/') if s.bytes.get(s.pos + 1) == Some(&b'/') => {
                    while let Some(b) = s.peek() {
                        if b == b'\n' {
                            break;
                        }
                        s.bump();
                    }
                }
                _ => break,
            }
        }
        let (start, line, column) = s.here();
        let Some(b) = s.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                span: Span::new(start, start, line, column),
            });
            break;
        };

        let kind = match b {
            b'{' => Some(TokenKind::LBrace),
            b'}' => Some(TokenKind::RBrace),
            b'.' => Some(TokenKind::Dot),
            b':' => Some(TokenKind::Colon),
            b'-' => {
                if s.bytes.get(s.pos + 1) == Some(&b'>') {
                    Some(TokenKind::Arrow)
                } else {
                    Some(TokenKind::Dash)
                }
            }
            _ => None,
        };
        if let Some(kind) = kind {
            s.bump();
            if kind == TokenKind::Arrow {
                s.bump();
            }
            let end = s.pos;
            tokens.push(Token {
                kind,
                text: src[start..end].to_string(),
                span: Span::new(start, end, line, column),
            });
            continue;
        }

        if is_ident_start(b) {
            while let Some(b) = s.peek() {
                if !is_ident_continue(b) {
                    break;
                }
                s.bump();
            }
            let end = s.pos;
            tokens.push(Token {
                kind: TokenKind::Ident,
                text: src[start..end].to_string(),
                span: Span::new(start, end, line, column),
            });
            continue;
        }

        // Unexpected bytes: absorb a maximal run into one diagnostic.
        while let Some(b) = s.peek() {
            if b.is_ascii_whitespace()
                || is_ident_start(b)
                || matches!(b, b'{' | b'}' | b'.' | b':' | b'-' | b'/')
            {
                break;
            }
            s.bump();
        }
        if s.pos == start {
            // A lone '/' not starting a comment lands here; consume it so the
            // scan always advances.
            s.bump();
        }
        let end = s.pos;
        diagnostics.push(Diagnostic::new(
            Severity::Error,
            Span::new(start, end, line, column),
            "E-PARSE",
            format!("unexpected characters {:?}", &src[start..end]),
        ));
    }

    (tokens, diagnostics)
}
