use num_bigint::BigUint;

use super::Span;
use crate::term::Expr;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BinOp {
    Iff,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Dvd,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

/// Binding power, loosest first. Shared by the parser and the printer.
pub mod prec {
    pub const IFF: u8 = 1;
    pub const ARROW: u8 = 2;
    pub const OR: u8 = 3;
    pub const AND: u8 = 4;
    pub const NOT: u8 = 5;
    pub const REL: u8 = 6;
    pub const ADD: u8 = 7;
    pub const MUL: u8 = 8;
    pub const NEG: u8 = 9;
    pub const POW: u8 = 10;
    pub const APP: u8 = 11;
    pub const ATOM: u8 = 12;
}

impl BinOp {
    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "↔" => BinOp::Iff,
            "∨" => BinOp::Or,
            "∧" => BinOp::And,
            "=" => BinOp::Eq,
            "≠" => BinOp::Ne,
            "<" => BinOp::Lt,
            "≤" => BinOp::Le,
            "∣" => BinOp::Dvd,
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "^" => BinOp::Pow,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Iff => "↔",
            BinOp::Or => "∨",
            BinOp::And => "∧",
            BinOp::Eq => "=",
            BinOp::Ne => "≠",
            BinOp::Lt => "<",
            BinOp::Le => "≤",
            BinOp::Dvd => "∣",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn prec(self) -> u8 {
        match self {
            BinOp::Iff => prec::IFF,
            BinOp::Or => prec::OR,
            BinOp::And => prec::AND,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Dvd => prec::REL,
            BinOp::Add | BinOp::Sub => prec::ADD,
            BinOp::Mul | BinOp::Div => prec::MUL,
            BinOp::Pow => prec::POW,
        }
    }

    pub fn assoc(self) -> Assoc {
        match self {
            BinOp::Iff | BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Dvd => Assoc::None,
            BinOp::Or | BinOp::And | BinOp::Pow => Assoc::Right,
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => Assoc::Left,
        }
    }

    /// Arithmetic operators whose carrier is chosen during elaboration.
    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Pow)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortKind {
    Prop,
    /// `Type n`
    Type(u32),
    /// `Sort n`
    Sort(u32),
}

#[derive(Clone, Debug)]
pub struct SBinder {
    pub name: String,
    pub ty: Option<STerm>,
    pub implicit: bool,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum STermKind {
    Ident(String),
    Num(BigUint),
    Placeholder,
    Sorry,
    Sort(SortKind),
    App(Box<STerm>, Vec<STerm>),
    /// `@f`: no implicit argument insertion.
    Explicit(String),
    Binary(BinOp, Box<STerm>, Box<STerm>),
    Neg(Box<STerm>),
    Inv(Box<STerm>),
    Not(Box<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Forall(Vec<SBinder>, Box<STerm>),
    Exists(Vec<SBinder>, Box<STerm>),
    Lambda(Vec<SBinder>, Box<STerm>),
    Let(String, Option<Box<STerm>>, Box<STerm>, Box<STerm>),
    AnonCtor(Vec<STerm>),
    Ascription(Box<STerm>, Box<STerm>),
    /// An already elaborated term spliced into surface syntax.
    Quoted(Expr),
}

#[derive(Clone, Debug)]
pub struct STerm {
    pub kind: STermKind,
    pub span: Span,
}

impl STerm {
    pub fn new(kind: STermKind, span: Span) -> STerm {
        STerm { kind, span }
    }
}

#[derive(Clone, Debug)]
pub enum Proof {
    Term(STerm),
    Tactics(Vec<Tactic>),
}

#[derive(Clone, Debug)]
pub struct RwRule {
    pub reverse: bool,
    pub term: STerm,
}

#[derive(Clone, Debug)]
pub struct CalcStep {
    pub relation: STerm,
    pub proof: Proof,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum TacticKind {
    Intro(Vec<String>),
    Exact(STerm),
    Apply(STerm),
    Rfl,
    Symm,
    Rw(Vec<RwRule>),
    Calc(Vec<CalcStep>),
    Have {
        name: String,
        ty: STerm,
        proof: Proof,
    },
    Simp {
        only: bool,
        lemmas: Vec<STerm>,
    },
    NormNum(Vec<STerm>),
    Abel,
    Sorry,
}

#[derive(Clone, Debug)]
pub struct Tactic {
    pub kind: TacticKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: String,
    pub binders: Vec<SBinder>,
    pub ty: Option<STerm>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum CommandKind {
    Import(String),
    Def {
        name: String,
        binders: Vec<SBinder>,
        ty: Option<STerm>,
        body: STerm,
    },
    /// `theorem`/`lemma` when named, `example` otherwise.
    Theorem {
        name: Option<String>,
        binders: Vec<SBinder>,
        statement: STerm,
        proof: Proof,
    },
    Axiom {
        name: String,
        binders: Vec<SBinder>,
        ty: STerm,
    },
    Inductive {
        name: String,
        binders: Vec<SBinder>,
        ty: Option<STerm>,
        ctors: Vec<CtorDecl>,
    },
    Check(STerm),
}

#[derive(Clone, Debug)]
pub struct Command {
    pub kind: CommandKind,
    pub span: Span,
    /// Span of the declaration header, where whole-command diagnostics point.
    pub head_span: Span,
}
