//! Surface syntax: tokens, parse trees, the parser, and the pretty printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

use serde::Serialize;
use thiserror::Error;

/// Byte range into UTF-8 source text.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// Shifts the span by `offset` bytes.
    pub fn offset(self, offset: usize) -> Span {
        Span::new(self.start + offset, self.end + offset)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SyntaxErrorKind {
    LexError,
    ParseError,
    UnsupportedTactic,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub fn lex(span: Span, message: &str) -> SyntaxError {
        SyntaxError {
            kind: SyntaxErrorKind::LexError,
            span,
            message: message.to_string(),
            expected: Vec::new(),
        }
    }

    pub fn parse(span: Span, message: impl Into<String>, expected: &[&str]) -> SyntaxError {
        SyntaxError {
            kind: SyntaxErrorKind::ParseError,
            span,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn unsupported(span: Span, tactic: &str) -> SyntaxError {
        SyntaxError {
            kind: SyntaxErrorKind::UnsupportedTactic,
            span,
            message: format!("unsupported tactic '{tactic}'"),
            expected: Vec::new(),
        }
    }
}
