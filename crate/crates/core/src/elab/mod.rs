//! Surface terms to kernel terms: name resolution, implicit arguments,
//! numeral typing and anonymous constructors.

pub mod command;
pub mod meta;
pub mod unify;

use num_bigint::BigUint;
use num_rational::BigRational;
use thiserror::Error;

use crate::env::{DeclKind, Environment};
use crate::kernel::arith::Carrier;
use crate::kernel::{KernelError, TypeChecker};
use crate::syntax::ast::*;
use crate::syntax::pretty::print_expr;
use crate::syntax::Span;
use crate::term::*;
use meta::{MetaContext, MetaKind};
use unify::Unifier;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ElabErrorKind {
    UnknownIdentifier,
    UnsolvedMeta,
    TypeMismatch,
    CtorArity,
    AmbiguousNumeral,
    NotAFunction,
    IncompleteReference,
    Kernel,
    Other,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct ElabError {
    pub span: Span,
    pub kind: ElabErrorKind,
    pub message: String,
}

impl ElabError {
    pub fn new(span: Span, kind: ElabErrorKind, message: impl Into<String>) -> Self {
        ElabError {
            span,
            kind,
            message: message.into(),
        }
    }

    fn kernel(span: Span, e: KernelError) -> Self {
        let kind = match e {
            KernelError::TypeMismatch { .. } => ElabErrorKind::TypeMismatch,
            KernelError::NotAFunction { .. } => ElabErrorKind::NotAFunction,
            _ => ElabErrorKind::Kernel,
        };
        ElabError::new(span, kind, e.to_string())
    }
}

pub type EResult<T> = Result<T, ElabError>;

#[derive(Copy, Clone, Debug, Default)]
pub struct ElabOptions {
    /// Accept theorems proved with `sorry` as justifications.
    pub allow_incomplete: bool,
}

#[derive(Clone, Debug)]
enum Operand {
    Done(Expr),
    Todo(STerm),
}

#[derive(Clone, Debug)]
enum PendingNode {
    Num(BigUint),
    Neg(Operand),
    Inv(Operand),
    /// Arithmetic operators and order relations whose carrier is not yet known.
    Binary(BinOp, Operand, Operand),
}

/// A numeral or operator waiting for its carrier type to be determined.
#[derive(Clone, Debug)]
struct Pending {
    placeholder: MVarId,
    carrier: Expr,
    node: PendingNode,
    lctx: LocalContext,
    span: Span,
}

enum CarrierState {
    Known(Carrier),
    Unknown(Expr),
    Other(Expr),
}

/// Module names accepted by `import`; they load nothing beyond the prelude.
pub const KNOWN_MODULES: &[&str] = &[
    "Mathlib",
    "Mathlib.Tactic",
    "Mathlib.Data.Real.Basic",
    "Mathlib.Data.Rat.Basic",
    "Mathlib.Data.Nat.Basic",
    "Mathlib.Data.Nat.GCD.Basic",
    "Mathlib.Data.Nat.Prime.Basic",
    "Mathlib.Data.Fintype.Card",
    "Mathlib.GroupTheory.Sylow",
    "Mathlib.Algebra.Group.Defs",
];

fn is_numeric(s: &STerm) -> bool {
    match &s.kind {
        STermKind::Num(_) => true,
        STermKind::Neg(a) | STermKind::Inv(a) => is_numeric(a),
        STermKind::Binary(op, a, b) if op.is_arith() => is_numeric(a) && is_numeric(b),
        _ => false,
    }
}

pub struct Elaborator<'a> {
    pub env: &'a Environment,
    pub lctx: LocalContext,
    pub mctx: MetaContext,
    pub opts: ElabOptions,
    pub used_sorry: bool,
    pending: Vec<Pending>,
}

/// Elaborates `s` in `lctx`, solving every metavariable it introduces.
pub fn elaborate(
    env: &Environment,
    lctx: &LocalContext,
    s: &STerm,
    expected: Option<&Expr>,
) -> EResult<(Expr, MetaContext)> {
    let mut el = Elaborator::new(env, lctx.clone(), MetaContext::new());
    let (e, _) = el.elab(s, expected)?;
    let e = el.finalize(&e, s.span)?;
    Ok((e, el.mctx))
}

impl<'a> Elaborator<'a> {
    pub fn new(env: &'a Environment, lctx: LocalContext, mctx: MetaContext) -> Self {
        Elaborator {
            env,
            lctx,
            mctx,
            opts: ElabOptions::default(),
            used_sorry: false,
            pending: Vec::new(),
        }
    }

    pub fn with_options(mut self, opts: ElabOptions) -> Self {
        self.opts = opts;
        self
    }

    // ---- utilities ----

    pub fn checker(&self) -> TypeChecker<'_> {
        TypeChecker::with_context(self.env, self.lctx.clone()).with_metas(&self.mctx)
    }

    pub fn infer(&self, e: &Expr, span: Span) -> EResult<Expr> {
        self.checker().infer(e).map_err(|k| ElabError::kernel(span, k))
    }

    pub fn whnf(&self, e: &Expr) -> Expr {
        let e = self.mctx.instantiate(e);
        self.checker().whnf(&e).unwrap_or(e)
    }

    pub fn instantiate(&self, e: &Expr) -> Expr {
        self.mctx.instantiate(e)
    }

    pub fn unify(&mut self, a: &Expr, b: &Expr) -> bool {
        Unifier::new(self.env, &self.lctx, &mut self.mctx).unify(a, b)
    }

    pub fn render(&self, e: &Expr) -> String {
        print_expr(self.env, &self.lctx, &self.mctx.instantiate(e))
    }

    pub fn new_mvar(&mut self, ty: Expr, span: Span) -> Expr {
        mvar(self.mctx.new_mvar(ty, self.lctx.clone(), Some(span), MetaKind::Natural))
    }

    fn new_type_mvar(&mut self, span: Span) -> Expr {
        self.new_mvar(type0(), span)
    }

    fn mismatch(&self, span: Span, expected: &Expr, actual: &Expr, what: Option<&Expr>) -> ElabError {
        let mut msg = format!(
            "type mismatch: expected {}, got {}",
            self.render(expected),
            self.render(actual)
        );
        if let Some(w) = what {
            msg = format!("{msg} for '{}'", self.render(w));
        }
        ElabError::new(span, ElabErrorKind::TypeMismatch, msg)
    }

    fn ensure_type(&mut self, e: &Expr, ty: &Expr, expected: Option<&Expr>, span: Span) -> EResult<()> {
        if let Some(exp) = expected {
            if !self.unify(ty, exp) {
                return Err(self.mismatch(span, exp, ty, Some(e)));
            }
        }
        Ok(())
    }

    fn carrier_state(&self, ty: &Expr) -> CarrierState {
        let t = self.mctx.instantiate(ty);
        if let Some(c) = Carrier::from_type(&t) {
            return CarrierState::Known(c);
        }
        if matches!(&*t, Term::MVar(_)) {
            return CarrierState::Unknown(t);
        }
        let w = self.whnf(&t);
        match Carrier::from_type(&w) {
            Some(c) => CarrierState::Known(c),
            None => CarrierState::Other(t),
        }
    }

    // ---- entry points ----

    /// Elaborates and checks against `expected`; returns the term and its type.
    pub fn elab(&mut self, s: &STerm, expected: Option<&Expr>) -> EResult<(Expr, Expr)> {
        let (e, ty) = self.elab_core(s, expected)?;
        self.ensure_type(&e, &ty, expected, s.span)?;
        Ok((e, ty))
    }

    pub fn elab_type(&mut self, s: &STerm) -> EResult<Expr> {
        let (e, ty) = self.elab(s, None)?;
        let w = self.whnf(&ty);
        match &*w {
            Term::Sort(_) => Ok(e),
            Term::MVar(_) if self.unify(&w, &type0()) => Ok(e),
            _ => Err(ElabError::new(
                s.span,
                ElabErrorKind::TypeMismatch,
                format!("type expected, '{}' has type {}", self.render(&e), self.render(&ty)),
            )),
        }
    }

    /// Resolves postponed numerals (defaulting to ℕ), instantiates, and
    /// rejects leftover metavariables.
    pub fn finalize(&mut self, e: &Expr, span: Span) -> EResult<Expr> {
        self.synthesize(0, true)?;
        let e = self.mctx.instantiate(e);
        if let Some(m) = self.mctx.unassigned_in(&e).first() {
            let d = self.mctx.decl(*m);
            let at = d.span.unwrap_or(span);
            let ty = print_expr(self.env, &d.lctx, &self.mctx.instantiate(&d.ty));
            return Err(ElabError::new(
                at,
                ElabErrorKind::UnsolvedMeta,
                format!("don't know how to synthesize placeholder of type {ty}"),
            ));
        }
        Ok(e)
    }

    /// Resolves postponed numerals created at index `from` or later.
    pub fn synthesize(&mut self, from: usize, default: bool) -> EResult<()> {
        loop {
            let mut progress = false;
            let mut i = from;
            while i < self.pending.len() {
                match self.carrier_state(&self.pending[i].carrier) {
                    CarrierState::Known(c) => {
                        let p = self.pending.remove(i);
                        self.realize(p, c)?;
                        progress = true;
                    }
                    CarrierState::Other(t) => {
                        let p = &self.pending[i];
                        return Err(ElabError::new(
                            p.span,
                            ElabErrorKind::AmbiguousNumeral,
                            format!("numerals and arithmetic are not supported at type {}", self.render(&t)),
                        ));
                    }
                    CarrierState::Unknown(_) => i += 1,
                }
            }
            if progress {
                continue;
            }
            if !default || self.pending.len() <= from {
                return Ok(());
            }
            let carrier = self.pending[from].carrier.clone();
            let span = self.pending[from].span;
            if !self.unify(&carrier, &cnst("Nat")) {
                return Err(ElabError::new(
                    span,
                    ElabErrorKind::AmbiguousNumeral,
                    "ambiguous numeral: cannot determine its type",
                ));
            }
        }
    }

    fn realize(&mut self, p: Pending, c: Carrier) -> EResult<()> {
        let saved = std::mem::replace(&mut self.lctx, p.lctx.clone());
        let r = self.build_pending(&p, c);
        self.lctx = saved;
        let v = r?;
        let target = mvar(p.placeholder);
        let ok = match self.mctx.decl(p.placeholder).assignment.clone() {
            Some(existing) => self.unify(&existing, &v),
            None => {
                self.mctx.assign(p.placeholder, v);
                true
            }
        };
        if !ok {
            let ty = self.mctx.decl(p.placeholder).ty.clone();
            return Err(self.mismatch(p.span, &ty, &ty, Some(&target)));
        }
        Ok(())
    }

    fn operand(&mut self, o: &Operand, ty: &Expr) -> EResult<Expr> {
        match o {
            Operand::Done(e) => Ok(e.clone()),
            Operand::Todo(s) => Ok(self.elab(s, Some(ty))?.0),
        }
    }

    fn build_pending(&mut self, p: &Pending, c: Carrier) -> EResult<Expr> {
        let cty = c.ty();
        match &p.node {
            PendingNode::Num(n) => Ok(c.literal(&BigRational::from_integer(n.clone().into()))),
            PendingNode::Neg(o) => {
                let a = self.operand(o, &cty)?;
                self.unary_op(c, "neg", a, p.span)
            }
            PendingNode::Inv(o) => {
                let a = self.operand(o, &cty)?;
                self.unary_op(c, "inv", a, p.span)
            }
            PendingNode::Binary(op, l, r) => {
                let a = self.operand(l, &cty)?;
                let rty = if *op == BinOp::Pow { cnst("Nat") } else { cty };
                let b = self.operand(r, &rty)?;
                self.binary_op(c, *op, a, b, p.span)
            }
        }
    }

    fn op_name(&self, c: Carrier, op: &str, span: Span) -> EResult<Expr> {
        let name = c.op(op);
        if self.env.contains(&name) {
            Ok(cnst(name))
        } else {
            Err(ElabError::new(
                span,
                ElabErrorKind::UnknownIdentifier,
                format!("operation '{op}' is not available on {}", c.type_name()),
            ))
        }
    }

    fn unary_op(&mut self, c: Carrier, op: &str, a: Expr, span: Span) -> EResult<Expr> {
        Ok(app(self.op_name(c, op, span)?, a))
    }

    fn binary_op(&mut self, c: Carrier, op: BinOp, a: Expr, b: Expr, span: Span) -> EResult<Expr> {
        let name = match op {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Pow => "pow",
            BinOp::Lt => "lt",
            BinOp::Le => "le",
            _ => unreachable!("not a carrier operator"),
        };
        Ok(mk_app(self.op_name(c, name, span)?, [a, b]))
    }

    fn postpone(&mut self, node: PendingNode, carrier: Expr, result_ty: Expr, span: Span) -> (Expr, Expr) {
        let ph = self
            .mctx
            .new_mvar(result_ty.clone(), self.lctx.clone(), Some(span), MetaKind::Goal);
        self.pending.push(Pending {
            placeholder: ph,
            carrier,
            node,
            lctx: self.lctx.clone(),
            span,
        });
        (mvar(ph), result_ty)
    }

    // ---- the main dispatch ----

    fn elab_core(&mut self, s: &STerm, expected: Option<&Expr>) -> EResult<(Expr, Expr)> {
        let span = s.span;
        match &s.kind {
            STermKind::Ident(_) | STermKind::Explicit(_) => self.elab_app(s, &[], expected, span),
            STermKind::App(f, args) => self.elab_app(f, args, expected, span),
            STermKind::Num(n) => self.elab_num(n, expected, span),
            STermKind::Placeholder => {
                let ty = match expected {
                    Some(t) => t.clone(),
                    None => self.new_type_mvar(span),
                };
                Ok((self.new_mvar(ty.clone(), span), ty))
            }
            STermKind::Sorry => self.elab_sorry(expected, span),
            STermKind::Sort(k) => {
                let l = match k {
                    SortKind::Prop => Level::PROP,
                    SortKind::Type(n) => Level(n + 1),
                    SortKind::Sort(n) => Level(*n),
                };
                Ok((sort(l), sort(l.succ())))
            }
            STermKind::Binary(op, a, b) => self.elab_binary(*op, a, b, expected, span),
            STermKind::Neg(a) | STermKind::Inv(a) => {
                let op = if matches!(s.kind, STermKind::Neg(_)) { "neg" } else { "inv" };
                self.elab_unary(op, a, expected, span)
            }
            STermKind::Not(p) => {
                let (p, _) = self.elab(p, Some(&prop()))?;
                Ok((app(cnst("Not"), p), prop()))
            }
            STermKind::Arrow(a, b) => {
                let a = self.elab_type(a)?;
                let b = self.elab_type(b)?;
                let e = pi(Binder::new("a", a), lift_loose(&b, 0, 1));
                let ty = self.infer(&e, span)?;
                Ok((e, ty))
            }
            STermKind::Forall(bs, body) => {
                let mark = self.lctx.len();
                let pmark = self.pending.len();
                for b in bs {
                    self.push_binder(b, None)?;
                }
                let body = self.elab_type(body)?;
                let e = self.close_scope(mark, pmark, &body, true)?;
                let ty = self.infer(&e, span)?;
                Ok((e, ty))
            }
            STermKind::Exists(bs, body) => {
                let mark = self.lctx.len();
                let pmark = self.pending.len();
                for b in bs {
                    self.push_binder(b, None)?;
                }
                let (body, _) = self.elab(body, Some(&prop()))?;
                self.synthesize(pmark, true)?;
                let mut e = self.mctx.instantiate(&body);
                let decls: Vec<LocalDecl> = self.lctx.decls()[mark..].to_vec();
                for d in decls.iter().rev() {
                    let mut d = d.clone();
                    d.ty = self.mctx.instantiate(&d.ty);
                    d.info = BinderInfo::Default;
                    let pred = mk_lambda(std::slice::from_ref(&d), &e);
                    e = mk_app(cnst("Exists"), [d.ty.clone(), pred]);
                }
                self.lctx.truncate(mark);
                Ok((e, prop()))
            }
            STermKind::Lambda(bs, body) => {
                let mark = self.lctx.len();
                let pmark = self.pending.len();
                let mut exp = expected.cloned();
                for b in bs {
                    let dom = exp.as_ref().and_then(|t| match &*self.whnf(t) {
                        Term::Pi(pb, pbody) => Some((pb.ty.clone(), pbody.clone())),
                        _ => None,
                    });
                    let x = self.push_binder(b, dom.as_ref().map(|d| d.0.clone()))?;
                    exp = dom.map(|(_, body)| instantiate(&body, &fvar(x)));
                }
                let (body, body_ty) = self.elab(body, exp.as_ref())?;
                let e = self.close_scope(mark, pmark, &body, false)?;
                let ty = self.infer(&e, span)?;
                let _ = body_ty;
                Ok((e, ty))
            }
            STermKind::Let(name, ty, val, body) => {
                let (val, vty) = match ty {
                    Some(t) => {
                        let t = self.elab_type(t)?;
                        let (v, _) = self.elab(val, Some(&t))?;
                        (v, t)
                    }
                    None => self.elab(val, None)?,
                };
                let mark = self.lctx.len();
                let pmark = self.pending.len();
                self.lctx.push_decl(name.clone(), vty, Some(val), BinderInfo::Default);
                let (body, _) = self.elab(body, expected)?;
                let e = self.close_scope(mark, pmark, &body, false)?;
                let ty = self.infer(&e, span)?;
                Ok((e, ty))
            }
            STermKind::AnonCtor(items) => self.elab_anon_ctor(items, expected, span),
            STermKind::Ascription(t, ty) => {
                let ty = self.elab_type(ty)?;
                let (e, _) = self.elab(t, Some(&ty))?;
                Ok((e, ty))
            }
            STermKind::Quoted(e) => {
                let ty = self.infer(e, span)?;
                Ok((e.clone(), ty))
            }
        }
    }

    fn push_binder(&mut self, b: &SBinder, default_ty: Option<Expr>) -> EResult<FVarId> {
        let ty = match (&b.ty, default_ty) {
            (Some(t), d) => {
                let t = self.elab_type(t)?;
                if let Some(d) = d {
                    if !self.unify(&t, &d) {
                        return Err(self.mismatch(b.span, &d, &t, None));
                    }
                }
                t
            }
            (None, Some(d)) => d,
            (None, None) => self.new_type_mvar(b.span),
        };
        let info = if b.implicit { BinderInfo::Implicit } else { BinderInfo::Default };
        Ok(self.lctx.push_decl(b.name.clone(), ty, None, info))
    }

    fn close_scope(&mut self, mark: usize, pmark: usize, body: &Expr, is_pi: bool) -> EResult<Expr> {
        self.synthesize(pmark, true)?;
        let body = self.mctx.instantiate(body);
        let decls: Vec<LocalDecl> = self.lctx.decls()[mark..]
            .iter()
            .map(|d| {
                let mut d = d.clone();
                d.ty = self.mctx.instantiate(&d.ty);
                d.value = d.value.as_ref().map(|v| self.mctx.instantiate(v));
                d
            })
            .collect();
        self.lctx.truncate(mark);
        Ok(if is_pi { mk_pi(&decls, &body) } else { mk_lambda(&decls, &body) })
    }

    // ---- names ----

    fn resolve_const(&self, name: &str, span: Span) -> EResult<Option<(Expr, Expr)>> {
        let canonical = match name {
            "ℝ" => "Real",
            "ℚ" => "Rat",
            "ℕ" => "Nat",
            other => other,
        };
        let Some(d) = self.env.get_str(canonical) else {
            return Ok(None);
        };
        if d.incomplete && matches!(d.kind, DeclKind::Theorem) && !self.opts.allow_incomplete {
            return Err(ElabError::new(
                span,
                ElabErrorKind::IncompleteReference,
                format!("'{name}' depends on 'sorry' and cannot be used as a justification"),
            ));
        }
        Ok(Some((cnst(d.name.clone()), d.ty.clone())))
    }

    /// Resolves a head identifier; field notation `h.symm` yields the
    /// receiver as an extra leading argument.
    fn resolve_head(&mut self, name: &str, span: Span) -> EResult<(Expr, Expr, Option<Expr>)> {
        if let Some(d) = self.lctx.find_by_name(name) {
            return Ok((fvar(d.fvar), d.ty.clone(), None));
        }
        if let Some((e, ty)) = self.resolve_const(name, span)? {
            return Ok((e, ty, None));
        }
        // Field chains `h.f.g`: the longest prefix naming a local is the receiver.
        let mut cuts: Vec<usize> = name.match_indices('.').map(|(i, _)| i).collect();
        cuts.reverse();
        for cut in cuts {
            let Some(d) = self.lctx.find_by_name(&name[..cut]).cloned() else {
                continue;
            };
            let fields: Vec<&str> = name[cut + 1..].split('.').collect();
            let (mut recv, mut rty) = (fvar(d.fvar), d.ty.clone());
            for (k, field) in fields.iter().enumerate() {
                let Some((e, fty)) = self.resolve_field(&rty, field, span)? else {
                    break;
                };
                if k + 1 == fields.len() {
                    return Ok((e, fty, Some(recv)));
                }
                let arg = STerm::new(STermKind::Quoted(recv), span);
                (recv, rty) = self.elab_args(e, fty, &[arg], false, None, span)?;
            }
            break;
        }
        Err(ElabError::new(
            span,
            ElabErrorKind::UnknownIdentifier,
            format!("unknown identifier '{name}'"),
        ))
    }

    /// `field` of a receiver of type `rty`: `T.field` for the type's head
    /// constant `T`; numeric fields name the components of And and Iff.
    fn resolve_field(&mut self, rty: &Expr, field: &str, span: Span) -> EResult<Option<(Expr, Expr)>> {
        let ty = self.whnf(&self.instantiate(rty));
        let Some(head) = const_name(get_app_fn(&ty)).map(|n| n.to_string()) else {
            return Ok(None);
        };
        let field = match (head.as_str(), field) {
            ("And", "1") => "left",
            ("And", "2") => "right",
            ("Iff", "1") => "mp",
            ("Iff", "2") => "mpr",
            (_, f) => f,
        };
        self.resolve_const(&format!("{head}.{field}"), span)
    }

    // ---- applications ----

    fn elab_app(&mut self, head: &STerm, args: &[STerm], expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        let (f, fty, recv, explicit) = match &head.kind {
            STermKind::Ident(n) => {
                let (f, t, r) = self.resolve_head(n, head.span)?;
                (f, t, r, false)
            }
            STermKind::Explicit(n) => {
                let (f, t, r) = self.resolve_head(n, head.span)?;
                (f, t, r, true)
            }
            _ => {
                let (f, t) = self.elab(head, None)?;
                (f, t, None, false)
            }
        };
        let mut all: Vec<STerm> = Vec::with_capacity(args.len() + 1);
        if let Some(r) = recv {
            all.push(STerm::new(STermKind::Quoted(r), head.span));
        }
        all.extend(args.iter().cloned());
        self.elab_args(f, fty, &all, explicit, expected, span)
    }

    /// Walks the function type, inserting metavariables for implicit
    /// binders, propagating the expected type, then checking arguments.
    fn elab_args(
        &mut self,
        f: Expr,
        fty: Expr,
        args: &[STerm],
        explicit: bool,
        expected: Option<&Expr>,
        span: Span,
    ) -> EResult<(Expr, Expr)> {
        let mut ty = fty;
        let mut vals = Vec::new();
        let mut slots: Vec<(MVarId, &STerm)> = Vec::new();
        let mut next = 0;
        loop {
            let t = match &*ty {
                Term::Pi(..) => ty.clone(),
                _ => self.whnf(&ty),
            };
            let Term::Pi(b, body) = &*t else {
                if next < args.len() {
                    let fe = mk_app(f.clone(), vals.iter().cloned());
                    return Err(ElabError::new(
                        args[next].span,
                        ElabErrorKind::NotAFunction,
                        format!(
                            "function expected: '{}' has type {} and cannot take more arguments",
                            self.render(&fe),
                            self.render(&ty)
                        ),
                    ));
                }
                break;
            };
            let is_explicit = explicit || b.info == BinderInfo::Default;
            if is_explicit && next == args.len() {
                break;
            }
            if !is_explicit && next == args.len() && explicit {
                break;
            }
            let at = if is_explicit { args[next].span } else { span };
            let m = self.mctx.new_mvar(b.ty.clone(), self.lctx.clone(), Some(at), MetaKind::Natural);
            vals.push(mvar(m));
            ty = instantiate(body, &mvar(m));
            if is_explicit {
                slots.push((m, &args[next]));
                next += 1;
            }
        }
        if let Some(exp) = expected {
            // Best effort; a definitive check follows the arguments.
            let _ = self.unify(&ty, exp);
        }
        for (m, arg) in slots {
            let bty = self.mctx.decl(m).ty.clone();
            let (e, ety) = self.elab(arg, Some(&bty))?;
            if !self.unify(&mvar(m), &e) {
                return Err(self.mismatch(arg.span, &bty, &ety, Some(&e)));
            }
        }
        let e = mk_app(f, vals);
        Ok((e, ty))
    }

    fn elab_anon_ctor(&mut self, items: &[STerm], expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        let Some(exp) = expected else {
            return Err(ElabError::new(
                span,
                ElabErrorKind::Other,
                "anonymous constructor notation requires an expected type",
            ));
        };
        let t = self.whnf(exp);
        let head = const_name(get_app_fn(&t)).cloned();
        let info = head.as_ref().and_then(|h| self.env.inductive(h));
        let Some(info) = info else {
            return Err(ElabError::new(
                span,
                ElabErrorKind::Other,
                format!("anonymous constructor: {} is not an inductive type", self.render(exp)),
            ));
        };
        if info.ctors.len() != 1 {
            return Err(ElabError::new(
                span,
                ElabErrorKind::CtorArity,
                format!(
                    "anonymous constructor: {} has {} constructors, expected exactly one",
                    self.render(exp),
                    info.ctors.len()
                ),
            ));
        }
        let ctor = info.ctors[0].clone();
        let nparams = info.num_params;
        let nfields = self.env.ctor(&ctor).map_or(0, |c| c.num_fields);
        let mut items = items.to_vec();
        if items.len() > nfields && nfields > 0 {
            let rest = items.split_off(nfields - 1);
            let s = rest[0].span.to(rest[rest.len() - 1].span);
            items.push(STerm::new(STermKind::AnonCtor(rest), s));
        }
        if items.len() != nfields {
            return Err(ElabError::new(
                span,
                ElabErrorKind::CtorArity,
                format!(
                    "anonymous constructor: '{ctor}' expects {nfields} arguments, got {}",
                    items.len()
                ),
            ));
        }
        let (_, targs) = get_app_fn_args(&t);
        let mut args: Vec<STerm> = targs
            .iter()
            .take(nparams)
            .map(|a| STerm::new(STermKind::Quoted(a.clone()), span))
            .collect();
        args.extend(items);
        let cty = self.env.get(&ctor).expect("constructor").ty.clone();
        self.elab_args(cnst(ctor), cty, &args, true, expected, span)
    }

    fn elab_sorry(&mut self, expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        let Some(exp) = expected else {
            return Err(ElabError::new(span, ElabErrorKind::Other, "'sorry' requires an expected type"));
        };
        let s = self.infer(exp, span)?;
        let ax = match &*self.whnf(&s) {
            Term::Sort(l) if l.is_prop() => "sorryAx",
            Term::Sort(l) if *l == Level::TYPE => "sorryAxType",
            _ => {
                return Err(ElabError::new(
                    span,
                    ElabErrorKind::Other,
                    format!("'sorry' is not supported at type {}", self.render(exp)),
                ))
            }
        };
        self.used_sorry = true;
        Ok((app(cnst(ax), exp.clone()), exp.clone()))
    }

    // ---- numerals and operators ----

    fn elab_num(&mut self, n: &BigUint, expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        let carrier = match expected {
            Some(t) => match self.carrier_state(t) {
                CarrierState::Known(c) => {
                    return Ok((c.literal(&BigRational::from_integer(n.clone().into())), c.ty()));
                }
                CarrierState::Unknown(m) => m,
                CarrierState::Other(t) => {
                    return Err(ElabError::new(
                        span,
                        ElabErrorKind::AmbiguousNumeral,
                        format!("cannot interpret numeral at type {}", self.render(&t)),
                    ))
                }
            },
            None => self.new_type_mvar(span),
        };
        Ok(self.postpone(PendingNode::Num(n.clone()), carrier.clone(), carrier, span))
    }

    /// Determines the carrier for an operator from the expected type or a
    /// non-numeral operand (which is elaborated on the way).
    fn operator_carrier(
        &mut self,
        operands: [&STerm; 2],
        expected: Option<&Expr>,
        span: Span,
    ) -> EResult<(Result<Carrier, Expr>, [Operand; 2])> {
        let mut ops = [Operand::Todo(operands[0].clone()), Operand::Todo(operands[1].clone())];
        if let Some(t) = expected {
            match self.carrier_state(t) {
                CarrierState::Known(c) => return Ok((Ok(c), ops)),
                CarrierState::Unknown(_) => {}
                CarrierState::Other(t) => {
                    return Err(ElabError::new(
                        span,
                        ElabErrorKind::TypeMismatch,
                        format!("arithmetic is not supported at type {}", self.render(&t)),
                    ))
                }
            }
        }
        let mut known: Option<Carrier> = None;
        let mut unknown: Option<Expr> = None;
        let mut types = Vec::new();
        for (i, s) in operands.iter().enumerate() {
            if is_numeric(s) {
                continue;
            }
            let (e, ty) = self.elab(s, None)?;
            ops[i] = Operand::Done(e.clone());
            match self.carrier_state(&ty) {
                CarrierState::Known(c) => {
                    known.get_or_insert(c);
                }
                CarrierState::Unknown(m) => {
                    unknown.get_or_insert(m);
                }
                CarrierState::Other(t) => {
                    return Err(ElabError::new(
                        s.span,
                        ElabErrorKind::TypeMismatch,
                        format!("arithmetic is not supported at type {}", self.render(&t)),
                    ))
                }
            }
            types.push((e, ty, s.span));
        }
        let target = match (known, &unknown) {
            (Some(c), _) => Some(c.ty()),
            (None, Some(m)) => Some(m.clone()),
            (None, None) => None,
        };
        if let Some(target) = &target {
            for (e, ty, at) in &types {
                if !self.unify(ty, target) {
                    return Err(self.mismatch(*at, target, ty, Some(e)));
                }
            }
        }
        if let Some(c) = known {
            return Ok((Ok(c), ops));
        }
        if let Some(m) = unknown {
            return Ok((Err(m), ops));
        }
        let m = match expected {
            Some(t) => self.mctx.instantiate(t),
            None => self.new_type_mvar(span),
        };
        Ok((Err(m), ops))
    }

    fn elab_unary(&mut self, op: &str, a: &STerm, expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        let dummy = STerm::new(STermKind::Num(BigUint::from(0u32)), span);
        let (car, [oa, _]) = self.operator_carrier([a, &dummy], expected, span)?;
        match car {
            Ok(c) => {
                let cty = c.ty();
                let x = self.operand(&oa, &cty)?;
                Ok((self.unary_op(c, op, x, span)?, cty))
            }
            Err(m) => {
                let node = if op == "neg" { PendingNode::Neg(oa) } else { PendingNode::Inv(oa) };
                Ok(self.postpone(node, m.clone(), m, span))
            }
        }
    }

    fn elab_binary(&mut self, op: BinOp, a: &STerm, b: &STerm, expected: Option<&Expr>, span: Span) -> EResult<(Expr, Expr)> {
        match op {
            BinOp::And | BinOp::Or | BinOp::Iff => {
                let (x, _) = self.elab(a, Some(&prop()))?;
                let (y, _) = self.elab(b, Some(&prop()))?;
                let name = match op {
                    BinOp::And => "And",
                    BinOp::Or => "Or",
                    _ => "Iff",
                };
                Ok((mk_app(cnst(name), [x, y]), prop()))
            }
            BinOp::Eq | BinOp::Ne => {
                let (x, y, ty) = if !is_numeric(a) || is_numeric(b) {
                    let (x, tx) = if is_numeric(a) {
                        let m = self.new_type_mvar(span);
                        self.elab(a, Some(&m))?
                    } else {
                        self.elab(a, None)?
                    };
                    let (y, _) = self.elab(b, Some(&tx))?;
                    (x, y, tx)
                } else {
                    let (y, ty) = self.elab(b, None)?;
                    let (x, _) = self.elab(a, Some(&ty))?;
                    (x, y, ty)
                };
                let name = if op == BinOp::Eq { "Eq" } else { "Ne" };
                Ok((mk_app(cnst(name), [ty, x, y]), prop()))
            }
            BinOp::Dvd => {
                let nat = cnst("Nat");
                let (x, _) = self.elab(a, Some(&nat))?;
                let (y, _) = self.elab(b, Some(&nat))?;
                Ok((mk_app(cnst("Nat.dvd"), [x, y]), prop()))
            }
            BinOp::Lt | BinOp::Le => {
                let (car, [oa, ob]) = self.operator_carrier([a, b], None, span)?;
                match car {
                    Ok(c) => {
                        let cty = c.ty();
                        let x = self.operand(&oa, &cty)?;
                        let y = self.operand(&ob, &cty)?;
                        Ok((self.binary_op(c, op, x, y, span)?, prop()))
                    }
                    Err(m) => Ok(self.postpone(PendingNode::Binary(op, oa, ob), m, prop(), span)),
                }
            }
            BinOp::Pow => {
                let dummy = STerm::new(STermKind::Num(BigUint::from(0u32)), span);
                let (car, [oa, _]) = self.operator_carrier([a, &dummy], expected, span)?;
                let ob = Operand::Todo(b.clone());
                match car {
                    Ok(c) => {
                        let cty = c.ty();
                        let x = self.operand(&oa, &cty)?;
                        let y = self.operand(&ob, &cnst("Nat"))?;
                        Ok((self.binary_op(c, op, x, y, span)?, cty))
                    }
                    Err(m) => Ok(self.postpone(PendingNode::Binary(op, oa, ob), m.clone(), m, span)),
                }
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
                let (car, [oa, ob]) = self.operator_carrier([a, b], expected, span)?;
                match car {
                    Ok(c) => {
                        let cty = c.ty();
                        let x = self.operand(&oa, &cty)?;
                        let y = self.operand(&ob, &cty)?;
                        Ok((self.binary_op(c, op, x, y, span)?, cty))
                    }
                    Err(m) => Ok(self.postpone(PendingNode::Binary(op, oa, ob), m.clone(), m, span)),
                }
            }
        }
    }
}
