use num_bigint::BigUint;

use super::{Span, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(BigUint),
    Keyword(&'static str),
    Sym(&'static str),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Num(n) => format!("numeral '{n}'"),
            Tok::Keyword(k) => format!("'{k}'"),
            Tok::Sym(s) => format!("'{s}'"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Zero-based column in characters.
    pub col: u32,
    pub first_on_line: bool,
}

pub const KEYWORDS: &[&str] = &[
    "import", "def", "theorem", "lemma", "example", "axiom", "inductive", "where", "by", "fun",
    "let", "calc", "have", "Type", "Prop", "Sort", "#check", "open", "namespace", "section", "end",
    "variable", "set_option", "noncomputable",
];

/// Keywords that begin a top-level command.
pub const COMMAND_KEYWORDS: &[&str] = &[
    "import", "def", "theorem", "lemma", "example", "axiom", "inductive", "#check", "open",
    "namespace", "section", "end", "variable", "set_option", "noncomputable",
];

// Longest match first.
const SYMBOLS: &[&str] = &[
    "<;>", ":=", "=>", "->", "<-", "<=", "⁻¹", "≠", "≤", "<", "=", "+", "-", "*", "/", "^", "∣",
    "↔", "→", "←", "∀", "∃", "λ", "∧", "∨", "¬", "⟨", "⟩", "(", ")", "[", "]", "{", "}", ":", ",",
    "|", "·", ";", "@", "_", "↦", "%", ".",
];

fn is_subscript(c: char) -> bool {
    ('\u{2080}'..='\u{2089}').contains(&c)
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ') || c == '_'
}

fn is_ident_rest(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || is_subscript(c) || c == '\'' || c == '!' || c == '?'
}

/// Splits source text into tokens, dropping whitespace and comments.
pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line_start = 0;
    let mut first_on_line = true;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().expect("non-empty");
        if c == '\n' {
            i += 1;
            line_start = i;
            first_on_line = true;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if rest.starts_with("--") {
            while i < src.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if rest.starts_with("/-") {
            let start = i;
            let mut depth = 0usize;
            loop {
                if i >= src.len() {
                    return Err(SyntaxError::lex(Span::new(start, start + 2), "unterminated comment"));
                }
                if src[i..].starts_with("/-") {
                    depth += 1;
                    i += 2;
                } else if src[i..].starts_with("-/") {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    if bytes[i] == b'\n' {
                        line_start = i + 1;
                        first_on_line = true;
                    }
                    i += src[i..].chars().next().map_or(1, char::len_utf8);
                }
            }
            continue;
        }
        let col = src[line_start..i].chars().count() as u32;
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < src.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Num(src[start..i].parse().expect("digits"))
        } else if c == '#' && rest.starts_with("#check") {
            i += "#check".len();
            Tok::Keyword("#check")
        } else if is_ident_start(c) && !(c == '_' && !rest[1..].starts_with(is_ident_rest)) {
            lex_ident(src, &mut i);
            let s = &src[start..i];
            match KEYWORDS.iter().find(|k| **k == s) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(s.to_string()),
            }
        } else if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            i += sym.len();
            Tok::Sym(normalize_symbol(sym))
        } else {
            return Err(SyntaxError::lex(
                Span::new(start, start + c.len_utf8()),
                &format!("unexpected character '{c}'"),
            ));
        };
        out.push(Token {
            tok,
            span: Span::new(start, i),
            col,
            first_on_line,
        });
        first_on_line = false;
    }
    Ok(out)
}

fn lex_ident(src: &str, i: &mut usize) {
    loop {
        let mut chars = src[*i..].chars();
        match chars.next() {
            Some(c) if is_ident_rest(c) => *i += c.len_utf8(),
            // A dot continues a hierarchical name only when an identifier follows.
            Some('.') if chars.next().is_some_and(|n| is_ident_start(n) && n != '_') => *i += 1,
            // Numeric projections `h.2.1`.
            Some('.') if src[*i + 1..].starts_with(|n: char| n.is_ascii_digit()) => {
                *i += 1;
                while src[*i..].starts_with(|n: char| n.is_ascii_digit()) {
                    *i += 1;
                }
            }
            _ => return,
        }
    }
}

fn normalize_symbol(sym: &'static str) -> &'static str {
    match sym {
        "->" => "→",
        "<-" => "←",
        "<=" => "≤",
        "↦" => "=>",
        "λ" => "fun",
        other => other,
    }
}
