use super::ast::*;
use super::lexer::{tokenize, Tok, Token, COMMAND_KEYWORDS};
use super::{Span, SyntaxError};

type PResult<T> = Result<T, SyntaxError>;

/// Layout contexts that decide where a line break ends a term.
#[derive(Copy, Clone, Debug)]
enum Layout {
    /// A tactic block whose tactics start at this column.
    Block(u32),
    /// A `calc` block: a line starting with `_`, or at the column of a first
    /// step written on its own line, begins the next step.
    Calc(Option<u32>),
}

const TACTIC_NAMES: &[&str] = &[
    "intro", "intros", "exact", "apply", "rfl", "symm", "rw", "rewrite", "simp", "norm_num", "abel",
    "sorry", "admit",
];

pub struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    src_len: usize,
    layout: Vec<Layout>,
}

/// A theorem header without its proof, as accepted by interactive sessions.
#[derive(Clone, Debug)]
pub struct Statement {
    pub binders: Vec<SBinder>,
    pub statement: STerm,
    pub span: Span,
}

/// Parses a whole file, recovering at command boundaries after an error.
pub fn parse_file(src: &str) -> (Vec<Command>, Vec<SyntaxError>) {
    let toks = match tokenize(src) {
        Ok(t) => t,
        Err(e) => return (Vec::new(), vec![e]),
    };
    let mut p = Parser::new(&toks, src.len());
    let mut cmds = Vec::new();
    let mut errs = Vec::new();
    while !p.eof() {
        match p.command() {
            Ok(c) => cmds.push(c),
            Err(e) => {
                errs.push(e);
                p.recover();
            }
        }
    }
    (cmds, errs)
}

/// Parses a token stream into commands, failing on the first error.
pub fn parse_commands(toks: &[Token], src_len: usize) -> PResult<Vec<Command>> {
    let mut p = Parser::new(toks, src_len);
    let mut cmds = Vec::new();
    while !p.eof() {
        cmds.push(p.command()?);
    }
    Ok(cmds)
}

pub fn parse_term(src: &str) -> PResult<STerm> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, src.len());
    let t = p.term(0)?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_tactics(src: &str) -> PResult<Vec<Tactic>> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, src.len());
    let t = p.tactic_block()?;
    p.expect_eof()?;
    Ok(t)
}

/// Accepts `theorem n (x : T) : P`, `example (x : T) : P`, `(x : T) : P` or a
/// bare proposition, optionally followed by `:=` and `by`.
pub fn parse_statement(src: &str) -> PResult<Statement> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, src.len());
    let start = p.cur_span();
    match p.peek_tok() {
        Some(Tok::Keyword("theorem" | "lemma")) => {
            p.bump();
            p.ident()?;
        }
        Some(Tok::Keyword("example")) => {
            p.bump();
        }
        _ => {}
    }
    let save = p.pos;
    let (binders, statement) = match p.header_tail() {
        Ok(r) => r,
        Err(e) => {
            p.pos = save;
            let t = p.term(0).map_err(|_| e)?;
            (Vec::new(), t)
        }
    };
    if p.eat_sym(":=") {
        p.eat_keyword("by");
    }
    p.expect_eof()?;
    Ok(Statement {
        binders,
        span: start.to(statement.span),
        statement,
    })
}

impl<'t> Parser<'t> {
    pub fn new(toks: &'t [Token], src_len: usize) -> Parser<'t> {
        Parser {
            toks,
            pos: 0,
            src_len,
            layout: Vec::new(),
        }
    }

    fn eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&'t Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> Span {
        match self.toks.last() {
            Some(t) => t.span,
            None => Span::new(0, self.src_len.max(1)),
        }
    }

    fn cur_span(&self) -> Span {
        self.peek().map_or_else(|| self.eof_span(), |t| t.span)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.cur_span()
        } else {
            self.toks[self.pos - 1].span
        }
    }

    fn since(&self, start: Span) -> Span {
        start.to(self.prev_span())
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let found = match self.peek() {
            Some(t) => t.tok.describe(),
            None => "end of input".to_string(),
        };
        let msg = if expected.is_empty() {
            format!("unexpected {found}")
        } else {
            format!("unexpected {found}; expected {}", expected.join(" or "))
        };
        SyntaxError::parse(self.cur_span(), msg, expected)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Keyword(x)) if *x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.is_keyword(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[&format!("'{s}'")]))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.eof() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek_tok() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn binder_name(&mut self) -> Option<String> {
        match self.peek_tok() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Some(s.clone())
            }
            Some(Tok::Sym("_")) => {
                self.pos += 1;
                Some("_".to_string())
            }
            _ => None,
        }
    }

    fn at_boundary_in(&self, layout: &[Layout]) -> bool {
        let Some(t) = self.peek() else {
            return true;
        };
        if let Tok::Keyword(k) = t.tok {
            if COMMAND_KEYWORDS.contains(&k) {
                return true;
            }
        }
        if !t.first_on_line {
            return false;
        }
        layout.iter().any(|l| match l {
            Layout::Block(c) => t.col <= *c,
            Layout::Calc(c) => t.tok == Tok::Sym("_") || c.is_some_and(|c| t.col <= c),
        })
    }

    fn at_boundary(&self) -> bool {
        self.at_boundary_in(&self.layout)
    }

    fn with_layout<T>(&mut self, l: Layout, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.layout.push(l);
        let r = f(self);
        self.layout.pop();
        r
    }

    fn recover(&mut self) {
        if !self.eof() {
            self.pos += 1;
        }
        while let Some(t) = self.peek() {
            if t.first_on_line && matches!(t.tok, Tok::Keyword(k) if COMMAND_KEYWORDS.contains(&k)) {
                break;
            }
            self.pos += 1;
        }
    }

    // ---- commands ----

    pub fn command(&mut self) -> PResult<Command> {
        let start = self.cur_span();
        let Some(Tok::Keyword(kw)) = self.peek_tok() else {
            return Err(self.error(&["command"]));
        };
        let kw = *kw;
        self.bump();
        let mut head_end = None;
        let kind = match kw {
            "import" => CommandKind::Import(self.ident()?),
            "noncomputable" | "def" => {
                if kw == "noncomputable" && !self.eat_keyword("def") {
                    return Err(self.error(&["'def'"]));
                }
                let name = self.ident()?;
                let binders = self.decl_binders()?;
                let ty = if self.eat_sym(":") { Some(self.term(0)?) } else { None };
                head_end = Some(self.prev_span());
                self.expect_sym(":=")?;
                let body = self.term(0)?;
                CommandKind::Def {
                    name,
                    binders,
                    ty,
                    body,
                }
            }
            "theorem" | "lemma" | "example" => {
                let name = if kw == "example" { None } else { Some(self.ident()?) };
                let (binders, statement) = self.header_tail()?;
                head_end = Some(self.prev_span());
                self.expect_sym(":=")?;
                let proof = self.proof()?;
                CommandKind::Theorem {
                    name,
                    binders,
                    statement,
                    proof,
                }
            }
            "axiom" => {
                let name = self.ident()?;
                let (binders, ty) = self.header_tail()?;
                CommandKind::Axiom { name, binders, ty }
            }
            "inductive" => self.inductive()?,
            "#check" => CommandKind::Check(self.term(0)?),
            other => {
                return Err(SyntaxError::parse(
                    start,
                    format!("unsupported command '{other}'"),
                    &["command"],
                ))
            }
        };
        let span = self.since(start);
        Ok(Command {
            kind,
            span,
            head_span: head_end.map_or(span, |e| start.to(e)),
        })
    }

    /// `binders : term`
    fn header_tail(&mut self) -> PResult<(Vec<SBinder>, STerm)> {
        let binders = self.decl_binders()?;
        self.expect_sym(":")?;
        let t = self.term(0)?;
        Ok((binders, t))
    }

    fn inductive(&mut self) -> PResult<CommandKind> {
        let name = self.ident()?;
        let binders = self.decl_binders()?;
        let ty = if self.eat_sym(":") { Some(self.term(0)?) } else { None };
        self.eat_keyword("where");
        let mut ctors = Vec::new();
        while self.is_sym("|") {
            let start = self.bump().span;
            let cname = self.ident()?;
            let binders = self.decl_binders()?;
            let cty = if self.eat_sym(":") { Some(self.term(0)?) } else { None };
            ctors.push(CtorDecl {
                name: cname,
                binders,
                ty: cty,
                span: self.since(start),
            });
        }
        Ok(CommandKind::Inductive {
            name,
            binders,
            ty,
            ctors,
        })
    }

    fn decl_binders(&mut self) -> PResult<Vec<SBinder>> {
        let mut out = Vec::new();
        loop {
            if self.is_sym("[") {
                return Err(SyntaxError::parse(
                    self.cur_span(),
                    "instance binders are not supported; state the hypothesis explicitly",
                    &["'('", "'{'"],
                ));
            }
            if !(self.is_sym("(") || self.is_sym("{")) {
                return Ok(out);
            }
            self.bracketed_group(&mut out)?;
        }
    }

    fn bracketed_group(&mut self, out: &mut Vec<SBinder>) -> PResult<()> {
        let open = self.bump();
        let implicit = open.tok == Tok::Sym("{");
        let close = if implicit { "}" } else { ")" };
        let mut names = Vec::new();
        while let Some(n) = self.binder_name() {
            names.push((n, self.prev_span()));
        }
        if names.is_empty() {
            return Err(self.error(&["identifier"]));
        }
        self.expect_sym(":")?;
        let ty = self.term(0)?;
        self.expect_sym(close)?;
        for (name, span) in names {
            out.push(SBinder {
                name,
                ty: Some(ty.clone()),
                implicit,
                span,
            });
        }
        Ok(())
    }

    /// Binders after `∀`, `∃` or `fun`: bracketed groups, or bare names with
    /// an optional shared type.
    fn quant_binders(&mut self) -> PResult<Vec<SBinder>> {
        let mut out = Vec::new();
        if self.is_sym("(") || self.is_sym("{") {
            while self.is_sym("(") || self.is_sym("{") {
                self.bracketed_group(&mut out)?;
            }
            return Ok(out);
        }
        let mut names = Vec::new();
        while let Some(n) = self.binder_name() {
            names.push((n, self.prev_span()));
        }
        if names.is_empty() {
            return Err(self.error(&["binder"]));
        }
        let ty = if self.eat_sym(":") { Some(self.term(0)?) } else { None };
        for (name, span) in names {
            out.push(SBinder {
                name,
                ty: ty.clone(),
                implicit: false,
                span,
            });
        }
        Ok(out)
    }

    // ---- terms ----

    pub fn term(&mut self, min: u8) -> PResult<STerm> {
        let mut lhs = self.prefix()?;
        loop {
            if self.at_boundary() {
                break;
            }
            let (p, assoc, op) = match self.peek_tok() {
                Some(Tok::Sym("→")) => (prec::ARROW, Assoc::Right, None),
                Some(Tok::Sym(s)) => match BinOp::from_symbol(s) {
                    Some(op) => (op.prec(), op.assoc(), Some(op)),
                    None => break,
                },
                _ => break,
            };
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.term(if assoc == Assoc::Right { p } else { p + 1 })?;
            let span = lhs.span.to(rhs.span);
            let kind = match op {
                Some(op) => STermKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                None => STermKind::Arrow(Box::new(lhs), Box::new(rhs)),
            };
            lhs = STerm::new(kind, span);
            if assoc == Assoc::None && !self.at_boundary() {
                if let Some(Tok::Sym(s)) = self.peek_tok() {
                    if BinOp::from_symbol(s).is_some_and(|o| o.prec() == p) {
                        return Err(SyntaxError::parse(
                            self.cur_span(),
                            format!("operator '{s}' is not associative; add parentheses"),
                            &[],
                        ));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> PResult<STerm> {
        let start = self.cur_span();
        match self.peek_tok() {
            Some(Tok::Sym("¬")) => {
                self.bump();
                let t = self.term(prec::REL)?;
                Ok(STerm::new(STermKind::Not(Box::new(t)), self.since(start)))
            }
            Some(Tok::Sym("-")) => {
                self.bump();
                let t = self.term(prec::POW)?;
                Ok(STerm::new(STermKind::Neg(Box::new(t)), self.since(start)))
            }
            Some(Tok::Sym("∀")) | Some(Tok::Sym("∃")) => {
                let forall = self.bump().tok == Tok::Sym("∀");
                let binders = self.quant_binders()?;
                self.expect_sym(",")?;
                let body = Box::new(self.term(0)?);
                let kind = if forall {
                    STermKind::Forall(binders, body)
                } else {
                    STermKind::Exists(binders, body)
                };
                Ok(STerm::new(kind, self.since(start)))
            }
            Some(Tok::Keyword("fun")) | Some(Tok::Sym("fun")) => {
                self.bump();
                let binders = self.quant_binders()?;
                self.expect_sym("=>")?;
                let body = self.term(0)?;
                Ok(STerm::new(STermKind::Lambda(binders, Box::new(body)), self.since(start)))
            }
            Some(Tok::Keyword("let")) => {
                let col = self.bump().col;
                let name = self.ident()?;
                let ty = if self.eat_sym(":") { Some(Box::new(self.term(0)?)) } else { None };
                self.expect_sym(":=")?;
                let val = self.with_layout(Layout::Block(col), |p| p.term(0))?;
                self.eat_sym(";");
                let body = self.term(0)?;
                Ok(STerm::new(
                    STermKind::Let(name, ty, Box::new(val), Box::new(body)),
                    self.since(start),
                ))
            }
            _ => self.app(),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek_tok() {
            Some(Tok::Ident(_)) | Some(Tok::Num(_)) => true,
            Some(Tok::Sym(s)) => matches!(*s, "(" | "⟨" | "_" | "@"),
            Some(Tok::Keyword(k)) => matches!(*k, "Type" | "Prop" | "Sort"),
            None => false,
        }
    }

    fn app(&mut self) -> PResult<STerm> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while !self.at_boundary() && self.starts_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            return Ok(head);
        }
        let span = head.span.to(args.last().expect("non-empty").span);
        Ok(STerm::new(STermKind::App(Box::new(head), args), span))
    }

    fn atom(&mut self) -> PResult<STerm> {
        let mut t = self.atom_core()?;
        while self.is_sym("⁻¹") && !self.at_boundary() {
            self.bump();
            let span = self.since(t.span);
            t = STerm::new(STermKind::Inv(Box::new(t)), span);
        }
        Ok(t)
    }

    fn level_arg(&mut self) -> u32 {
        if self.at_boundary() {
            return 0;
        }
        match self.peek_tok() {
            Some(Tok::Num(n)) => {
                let n = u32::try_from(n).unwrap_or(u32::MAX - 1);
                self.pos += 1;
                n
            }
            _ => 0,
        }
    }

    fn atom_core(&mut self) -> PResult<STerm> {
        let start = self.cur_span();
        let Some(tok) = self.peek_tok() else {
            return Err(self.error(&["term"]));
        };
        let kind = match tok {
            Tok::Ident(s) if s == "sorry" => {
                self.bump();
                STermKind::Sorry
            }
            Tok::Ident(s) => {
                self.bump();
                STermKind::Ident(s.clone())
            }
            Tok::Num(n) => {
                self.bump();
                STermKind::Num(n.clone())
            }
            Tok::Sym("_") => {
                self.bump();
                STermKind::Placeholder
            }
            Tok::Sym("@") => {
                self.bump();
                STermKind::Explicit(self.ident()?)
            }
            Tok::Keyword("Prop") => {
                self.bump();
                STermKind::Sort(SortKind::Prop)
            }
            Tok::Keyword("Type") => {
                self.bump();
                STermKind::Sort(SortKind::Type(self.level_arg()))
            }
            Tok::Keyword("Sort") => {
                self.bump();
                STermKind::Sort(SortKind::Sort(self.level_arg()))
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.with_layout_cleared(|p| {
                    let t = p.term(0)?;
                    if p.eat_sym(":") {
                        let ty = p.term(0)?;
                        p.expect_sym(")")?;
                        Ok(STermKind::Ascription(Box::new(t), Box::new(ty)))
                    } else {
                        p.expect_sym(")")?;
                        Ok(t.kind)
                    }
                })?;
                inner
            }
            Tok::Sym("⟨") => {
                self.bump();
                let items = self.with_layout_cleared(|p| {
                    let mut items = Vec::new();
                    if !p.is_sym("⟩") {
                        loop {
                            items.push(p.term(0)?);
                            if !p.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    p.expect_sym("⟩")?;
                    Ok(items)
                })?;
                STermKind::AnonCtor(items)
            }
            _ => return Err(self.error(&["term"])),
        };
        Ok(STerm::new(kind, self.since(start)))
    }

    /// Inside brackets line breaks do not end terms.
    fn with_layout_cleared<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = std::mem::take(&mut self.layout);
        let r = f(self);
        self.layout = saved;
        r
    }

    // ---- tactics ----

    fn proof(&mut self) -> PResult<Proof> {
        if self.eat_keyword("by") {
            Ok(Proof::Tactics(self.tactic_block()?))
        } else {
            Ok(Proof::Term(self.term(0)?))
        }
    }

    pub fn tactic_block(&mut self) -> PResult<Vec<Tactic>> {
        if self.eof() {
            return Err(self.error(&["tactic"]));
        }
        let col = self.peek().map_or(0, |t| t.col);
        let outer = self.layout.clone();
        self.with_layout(Layout::Block(col), |p| {
            let mut out = Vec::new();
            loop {
                out.push(p.tactic()?);
                let Some(t) = p.peek() else {
                    break;
                };
                if t.tok == Tok::Sym(";") {
                    p.bump();
                    continue;
                }
                if t.tok == Tok::Sym("<;>") {
                    return Err(SyntaxError::unsupported(t.span, "<;>"));
                }
                if p.at_boundary_in(&outer) {
                    break;
                }
                if t.first_on_line && t.col == col {
                    continue;
                }
                if t.first_on_line && t.col < col {
                    break;
                }
                return Err(p.error(&["end of tactic"]));
            }
            Ok(out)
        })
    }

    fn lemma_list(&mut self) -> PResult<Vec<STerm>> {
        let mut out = Vec::new();
        if !self.eat_sym("[") {
            return Ok(out);
        }
        self.with_layout_cleared(|p| {
            if !p.is_sym("]") {
                loop {
                    out.push(p.term(0)?);
                    if !p.eat_sym(",") {
                        break;
                    }
                }
            }
            p.expect_sym("]")?;
            Ok(out)
        })
    }

    fn reject_location(&mut self, tactic: &str) -> PResult<()> {
        if !self.at_boundary() && matches!(self.peek_tok(), Some(Tok::Ident(s)) if s == "at") {
            return Err(SyntaxError::unsupported(self.cur_span(), &format!("{tactic} at")));
        }
        Ok(())
    }

    fn tactic(&mut self) -> PResult<Tactic> {
        let start = self.cur_span();
        let Some(tok) = self.peek_tok() else {
            return Err(self.error(&["tactic"]));
        };
        let kind = match tok {
            Tok::Keyword("calc") => {
                self.bump();
                TacticKind::Calc(self.calc_steps()?)
            }
            Tok::Keyword("have") => {
                self.bump();
                let name = if self.is_sym(":") { "this".to_string() } else { self.ident()? };
                self.expect_sym(":")?;
                let ty = self.term(0)?;
                self.expect_sym(":=")?;
                let proof = self.proof()?;
                TacticKind::Have { name, ty, proof }
            }
            Tok::Ident(name) if TACTIC_NAMES.contains(&name.as_str()) => {
                let name = name.clone();
                self.bump();
                match name.as_str() {
                    "intro" | "intros" => {
                        let mut names = Vec::new();
                        while !self.at_boundary() {
                            match self.binder_name() {
                                Some(n) => names.push(n),
                                None => break,
                            }
                        }
                        TacticKind::Intro(names)
                    }
                    "exact" => TacticKind::Exact(self.term(0)?),
                    "apply" => TacticKind::Apply(self.term(0)?),
                    "rfl" => TacticKind::Rfl,
                    "symm" => TacticKind::Symm,
                    "rw" | "rewrite" => {
                        self.expect_sym("[")?;
                        let rules = self.with_layout_cleared(|p| {
                            let mut rules = Vec::new();
                            loop {
                                let reverse = p.eat_sym("←");
                                rules.push(RwRule {
                                    reverse,
                                    term: p.term(0)?,
                                });
                                if !p.eat_sym(",") {
                                    break;
                                }
                            }
                            p.expect_sym("]")?;
                            Ok(rules)
                        })?;
                        self.reject_location("rw")?;
                        TacticKind::Rw(rules)
                    }
                    "simp" => {
                        let only = matches!(self.peek_tok(), Some(Tok::Ident(s)) if s == "only");
                        if only {
                            self.bump();
                        }
                        let lemmas = self.lemma_list()?;
                        self.reject_location("simp")?;
                        TacticKind::Simp { only, lemmas }
                    }
                    "norm_num" => {
                        let lemmas = self.lemma_list()?;
                        self.reject_location("norm_num")?;
                        TacticKind::NormNum(lemmas)
                    }
                    "abel" => TacticKind::Abel,
                    _ => TacticKind::Sorry,
                }
            }
            Tok::Ident(name) => return Err(SyntaxError::unsupported(start, name)),
            Tok::Sym("·") => return Err(SyntaxError::unsupported(start, "·")),
            Tok::Keyword(k @ ("fun" | "let")) => return Err(SyntaxError::unsupported(start, k)),
            _ => return Err(self.error(&["tactic"])),
        };
        Ok(Tactic {
            kind,
            span: self.since(start),
        })
    }

    fn calc_steps(&mut self) -> PResult<Vec<CalcStep>> {
        let outer = self.layout.clone();
        let col = self.peek().filter(|t| t.first_on_line).map(|t| t.col);
        self.with_layout(Layout::Calc(col), |p| {
            let mut steps = Vec::new();
            loop {
                let start = p.cur_span();
                let relation = p.term(0)?;
                p.expect_sym(":=")?;
                let proof = p.proof()?;
                steps.push(CalcStep {
                    relation,
                    proof,
                    span: p.since(start),
                });
                match p.peek() {
                    Some(t)
                        if t.first_on_line
                            && (t.tok == Tok::Sym("_") || col == Some(t.col))
                            && !p.at_boundary_in(&outer) => {}
                    _ => break,
                }
            }
            Ok(steps)
        })
    }
}
