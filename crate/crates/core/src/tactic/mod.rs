//! Goal states and the tactic set.
//!
//! A [`ProofState`] is a value: every tactic returns a new state and leaves
//! its input untouched, so a failed step never corrupts an interactive session.

pub mod abel;
mod calc;
mod norm_num;
mod rewrite;

use serde::Serialize;
use thiserror::Error;

use crate::elab::meta::{MetaContext, MetaKind};
use crate::elab::unify::Unifier;
use crate::elab::{ElabError, ElabErrorKind, ElabOptions, Elaborator};
use crate::env::Environment;
use crate::kernel::{KResult, TypeChecker};
use crate::syntax::ast::{Proof, STerm, Tactic, TacticKind};
use crate::syntax::pretty::{print_expr, render_goal, render_hyps};
use crate::syntax::Span;
use crate::term::*;

/// Rewrite budget shared by `simp` and the lemma phase of `norm_num`.
pub const SIMP_FUEL: usize = 1000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TacticErrorKind {
    NoGoals,
    Failed,
    UnsolvedGoals,
    RwNoMatch,
    RwMotiveIllTyped,
    CalcChainMismatch,
    CalcEndpointMismatch,
    NormNumFalse,
    NormNumNotClosed,
    DivisionByZero,
    AbelNonGroupTerm,
    Elab(ElabErrorKind),
}

impl TacticErrorKind {
    /// Stable identifier used in reports and on the wire.
    pub fn reason(self) -> &'static str {
        match self {
            TacticErrorKind::NoGoals => "NoGoals",
            TacticErrorKind::Failed => "TacticFailure",
            TacticErrorKind::UnsolvedGoals => "UnsolvedGoals",
            TacticErrorKind::RwNoMatch => "RwNoMatch",
            TacticErrorKind::RwMotiveIllTyped => "RwMotiveIllTyped",
            TacticErrorKind::CalcChainMismatch => "CalcChainMismatch",
            TacticErrorKind::CalcEndpointMismatch => "CalcEndpointMismatch",
            TacticErrorKind::NormNumFalse => "NormNumFalse",
            TacticErrorKind::NormNumNotClosed => "NormNumNotClosed",
            TacticErrorKind::DivisionByZero => "DivisionByZero",
            TacticErrorKind::AbelNonGroupTerm => "AbelNonGroupTerm",
            TacticErrorKind::Elab(k) => match k {
                ElabErrorKind::UnknownIdentifier => "UnknownIdentifier",
                ElabErrorKind::UnsolvedMeta => "UnsolvedMeta",
                ElabErrorKind::TypeMismatch => "TypeMismatch",
                ElabErrorKind::CtorArity => "CtorArity",
                ElabErrorKind::AmbiguousNumeral => "AmbiguousNumeral",
                ElabErrorKind::NotAFunction => "NotAFunction",
                ElabErrorKind::IncompleteReference => "IncompleteReference",
                ElabErrorKind::Kernel => "KernelError",
                ElabErrorKind::Other => "ElabError",
            },
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct TacticError {
    pub kind: TacticErrorKind,
    pub goal: Option<MVarId>,
    pub span: Span,
    pub message: String,
}

impl TacticError {
    pub fn new(kind: TacticErrorKind, span: Span, message: impl Into<String>) -> Self {
        TacticError {
            kind,
            goal: None,
            span,
            message: message.into(),
        }
    }

    fn at_goal(mut self, g: MVarId) -> Self {
        self.goal.get_or_insert(g);
        self
    }
}

impl From<ElabError> for TacticError {
    fn from(e: ElabError) -> Self {
        TacticError::new(TacticErrorKind::Elab(e.kind), e.span, e.message)
    }
}

pub type TResult<T> = Result<T, TacticError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

/// Wire rendering of one goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GoalReport {
    pub goal_id: u64,
    pub hypotheses: Vec<Hypothesis>,
    pub target: String,
}

#[derive(Clone)]
pub struct ProofState {
    pub env: Environment,
    pub mctx: MetaContext,
    pub goals: Vec<MVarId>,
    pub root: MVarId,
    pub used_sorry: bool,
    pub opts: ElabOptions,
}

impl std::fmt::Debug for ProofState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render_goals())
    }
}

impl ProofState {
    /// One goal `lctx ⊢ target`; the target must be a type.
    pub fn new(env: &Environment, lctx: &LocalContext, target: &Expr) -> KResult<ProofState> {
        let mut tc = TypeChecker::with_context(env, lctx.clone());
        let ty = tc.infer(target)?;
        tc.ensure_sort(&ty)?;
        let mut mctx = MetaContext::new();
        let root = mctx.new_mvar(target.clone(), lctx.clone(), None, MetaKind::Goal);
        Ok(ProofState {
            env: env.clone(),
            mctx,
            goals: vec![root],
            root,
            used_sorry: false,
            opts: ElabOptions::default(),
        })
    }

    pub fn with_options(mut self, opts: ElabOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn is_solved(&self) -> bool {
        self.goals.is_empty()
    }

    /// The assembled proof, once no metavariables remain.
    pub fn proof(&self) -> Option<Expr> {
        let p = self.mctx.instantiate(&mvar(self.root));
        (!has_mvars(&p)).then_some(p)
    }

    pub fn goal_lctx(&self, g: MVarId) -> &LocalContext {
        &self.mctx.decl(g).lctx
    }

    pub fn goal_target(&self, g: MVarId) -> Expr {
        self.mctx.instantiate(&self.mctx.decl(g).ty)
    }

    pub fn render_goal(&self, g: MVarId) -> String {
        render_goal(&self.env, self.goal_lctx(g), &self.goal_target(g))
    }

    pub fn render_goals(&self) -> String {
        if self.goals.is_empty() {
            return "no goals".to_string();
        }
        let parts: Vec<String> = self.goals.iter().map(|g| self.render_goal(*g)).collect();
        parts.join("\n\n")
    }

    pub fn goal_report(&self, g: MVarId) -> GoalReport {
        let lctx = self.goal_lctx(g);
        let inst = instantiate_lctx(&self.mctx, lctx);
        GoalReport {
            goal_id: g.0,
            hypotheses: render_hyps(&self.env, &inst)
                .into_iter()
                .map(|h| Hypothesis { name: h.name, ty: h.ty })
                .collect(),
            target: print_expr(&self.env, &inst, &self.goal_target(g)),
        }
    }

    pub fn goal_reports(&self) -> Vec<GoalReport> {
        self.goals.iter().map(|g| self.goal_report(*g)).collect()
    }

    /// Runs one tactic on a copy of the state.
    pub fn run(&self, tac: &Tactic) -> TResult<ProofState> {
        let mut s = self.clone();
        let g = s.goals.first().copied();
        s.step(tac).map_err(|e| match g {
            Some(g) => e.at_goal(g),
            None => e,
        })?;
        s.prune();
        Ok(s)
    }

    pub fn run_all(&self, tacs: &[Tactic]) -> TResult<ProofState> {
        let mut s = self.clone();
        for t in tacs {
            s = s.run(t)?;
        }
        Ok(s)
    }

    fn prune(&mut self) {
        let mctx = &self.mctx;
        self.goals.retain(|g| !mctx.is_assigned(*g));
    }

    fn main_goal(&self, span: Span) -> TResult<MVarId> {
        self.goals
            .iter()
            .copied()
            .find(|g| !self.mctx.is_assigned(*g))
            .ok_or_else(|| TacticError::new(TacticErrorKind::NoGoals, span, "no goals to be proved"))
    }

    /// Replaces goal `old` in the list with `new` (in place).
    fn replace_goal(&mut self, old: MVarId, new: &[MVarId]) {
        let pos = self.goals.iter().position(|g| *g == old).unwrap_or(0);
        self.goals.retain(|g| *g != old);
        for (i, g) in new.iter().enumerate() {
            self.goals.insert((pos + i).min(self.goals.len()), *g);
        }
    }

    fn new_goal(&mut self, ty: Expr, lctx: LocalContext) -> MVarId {
        self.mctx.new_mvar(ty, lctx, None, MetaKind::Goal)
    }

    /// Runs `f` with an elaborator positioned in goal `g`'s context.
    fn with_elab<T>(&mut self, g: MVarId, f: impl FnOnce(&mut Elaborator<'_>) -> Result<T, ElabError>) -> TResult<T> {
        let env = self.env.clone();
        let lctx = instantiate_lctx(&self.mctx, self.goal_lctx(g));
        let mctx = std::mem::take(&mut self.mctx);
        let mut el = Elaborator::new(&env, lctx, mctx).with_options(self.opts);
        let r = f(&mut el);
        self.used_sorry |= el.used_sorry;
        self.mctx = el.mctx;
        Ok(r?)
    }

    pub(crate) fn unify_in(&mut self, g: MVarId, a: &Expr, b: &Expr) -> bool {
        let lctx = self.goal_lctx(g).clone();
        Unifier::new(&self.env, &lctx, &mut self.mctx).unify(a, b)
    }

    pub(crate) fn whnf_in(&self, g: MVarId, e: &Expr) -> Expr {
        let e = self.mctx.instantiate(e);
        TypeChecker::with_context(&self.env, self.goal_lctx(g).clone())
            .with_metas(&self.mctx)
            .whnf(&e)
            .unwrap_or(e)
    }

    pub(crate) fn render_in(&self, g: MVarId, e: &Expr) -> String {
        print_expr(&self.env, self.goal_lctx(g), &self.mctx.instantiate(e))
    }

    fn step(&mut self, tac: &Tactic) -> TResult<()> {
        let span = tac.span;
        match &tac.kind {
            TacticKind::Intro(names) => {
                if names.is_empty() {
                    self.intro(None, span)
                } else {
                    names.iter().try_for_each(|n| self.intro(Some(n), span))
                }
            }
            TacticKind::Exact(t) => {
                let g = self.main_goal(span)?;
                let e = self.elab_against(g, t)?;
                self.mctx.assign(g, e);
                Ok(())
            }
            TacticKind::Apply(t) => self.apply(t, span),
            TacticKind::Rfl => {
                let g = self.main_goal(span)?;
                if self.try_rfl(g) {
                    Ok(())
                } else {
                    Err(TacticError::new(
                        TacticErrorKind::Failed,
                        span,
                        format!(
                            "The rfl tactic failed: the two sides are not definitionally equal\n{}",
                            self.render_goal(g)
                        ),
                    ))
                }
            }
            TacticKind::Symm => self.symm(span),
            TacticKind::Rw(rules) => self.rw(rules, span),
            TacticKind::Calc(steps) => self.calc(steps, span),
            TacticKind::Have { name, ty, proof } => self.have(name, ty, proof, span),
            TacticKind::Simp { only, lemmas } => self.simp(*only, lemmas, span),
            TacticKind::NormNum(lemmas) => {
                let g = self.main_goal(span)?;
                self.norm_num(g, lemmas, 0, span)
            }
            TacticKind::Abel => self.abel(span),
            TacticKind::Sorry => {
                let g = self.main_goal(span)?;
                let target = self.goal_target(g);
                let pf = self.sorry_term(g, &target);
                self.mctx.assign(g, pf);
                Ok(())
            }
        }
    }

    fn sorry_term(&mut self, g: MVarId, target: &Expr) -> Expr {
        self.used_sorry = true;
        let is_prop = self.is_prop_in(g, target);
        app(cnst(if is_prop { "sorryAx" } else { "sorryAxType" }), target.clone())
    }

    /// Elaborates `t` against goal `g`'s target with every metavariable solved.
    fn elab_against(&mut self, g: MVarId, t: &STerm) -> TResult<Expr> {
        let target = self.goal_target(g);
        self.with_elab(g, |el| {
            let (e, _) = el.elab(t, Some(&target))?;
            el.finalize(&e, t.span)
        })
    }

    fn intro(&mut self, name: Option<&String>, span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let target = self.goal_target(g);
        let t = match &*target {
            Term::Pi(..) | Term::Let(..) => target.clone(),
            _ => self.whnf_in(g, &target),
        };
        let mut lctx = self.goal_lctx(g).clone();
        let (x, body) = match &*t {
            Term::Pi(b, body) => {
                let n = name.cloned().unwrap_or_else(|| b.name.clone());
                (lctx.push_decl(n, b.ty.clone(), None, BinderInfo::Default), body.clone())
            }
            Term::Let(b, v, body) => {
                let n = name.cloned().unwrap_or_else(|| b.name.clone());
                (lctx.push_decl(n, b.ty.clone(), Some(v.clone()), BinderInfo::Default), body.clone())
            }
            _ => {
                return Err(TacticError::new(
                    TacticErrorKind::Failed,
                    span,
                    format!("intro failed: no binder to introduce in {}", self.render_in(g, &target)),
                ))
            }
        };
        let decl = lctx.get(x).cloned().expect("just pushed");
        let ng = self.new_goal(instantiate(&body, &fvar(x)), lctx);
        self.mctx.delay(g, vec![decl], ng);
        self.replace_goal(g, &[ng]);
        Ok(())
    }

    fn apply(&mut self, t: &STerm, span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let target = self.goal_target(g);
        let before = self.mctx.len();
        let (f, fty) = self.with_elab(g, |el| {
            let (f, ty) = el.elab(t, None)?;
            el.synthesize(0, false)?;
            Ok((f, ty))
        })?;
        let lctx = self.goal_lctx(g).clone();
        let snapshot = self.mctx.clone();
        let mut found = None;
        for k in 0..64 {
            self.mctx = snapshot.clone();
            let mut e = f.clone();
            let mut ty = self.mctx.instantiate(&fty);
            let mut ok = true;
            for _ in 0..k {
                let w = match &*ty {
                    Term::Pi(..) => ty.clone(),
                    _ => self.whnf_in(g, &ty),
                };
                let Term::Pi(b, body) = &*w else {
                    ok = false;
                    break;
                };
                let m = self.mctx.new_mvar(b.ty.clone(), lctx.clone(), Some(span), MetaKind::Natural);
                e = app(e, mvar(m));
                ty = instantiate(body, &mvar(m));
            }
            if !ok {
                break;
            }
            if self.unify_in(g, &ty, &target) {
                found = Some(e);
                break;
            }
        }
        let Some(e) = found else {
            self.mctx = snapshot;
            return Err(TacticError::new(
                TacticErrorKind::Failed,
                span,
                format!(
                    "apply failed: could not unify the conclusion of {} with the goal {}",
                    self.render_in(g, &fty),
                    self.render_in(g, &target)
                ),
            ));
        };
        self.with_elab(g, |el| el.synthesize(0, true))?;
        let e = self.mctx.instantiate(&e);
        let new: Vec<MVarId> = self
            .mctx
            .unassigned_in(&e)
            .into_iter()
            .filter(|m| m.0 as usize >= before)
            .collect();
        self.mctx.assign(g, e);
        self.replace_goal(g, &new);
        Ok(())
    }

    /// Closes `g` if it is `a = a` (or `a ↔ a`) up to unification.
    pub(crate) fn try_rfl(&mut self, g: MVarId) -> bool {
        let target = self.goal_target(g);
        let t = if eq_parts(&target).is_some() || match_const_app(&target, "Iff", 2).is_some() {
            target
        } else {
            self.whnf_in(g, &target)
        };
        if let Some((ty, a, b)) = eq_parts(&t) {
            if self.unify_in(g, &a, &b) {
                let pf = mk_app(cnst("Eq.refl"), [ty, self.mctx.instantiate(&a)]);
                self.mctx.assign(g, pf);
                return true;
            }
        } else if let Some(args) = match_const_app(&t, "Iff", 2) {
            if self.env.contains(&Name::new("Iff.refl")) && self.unify_in(g, &args[0], &args[1]) {
                let pf = app(cnst("Iff.refl"), self.mctx.instantiate(&args[0]));
                self.mctx.assign(g, pf);
                return true;
            }
        } else if const_name(&t).is_some_and(|n| n.as_str() == "True") {
            self.mctx.assign(g, cnst("True.intro"));
            return true;
        }
        false
    }

    fn symm(&mut self, span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let target = self.goal_target(g);
        let t = if eq_parts(&target).is_some() { target.clone() } else { self.whnf_in(g, &target) };
        let Some((ty, a, b)) = eq_parts(&t) else {
            return Err(TacticError::new(
                TacticErrorKind::Failed,
                span,
                format!("symm failed: {} is not an equation", self.render_in(g, &target)),
            ));
        };
        let lctx = self.goal_lctx(g).clone();
        let ng = self.new_goal(mk_app(cnst("Eq"), [ty.clone(), b.clone(), a.clone()]), lctx);
        self.mctx.assign(g, mk_app(cnst("Eq.symm"), [ty, b, a, mvar(ng)]));
        self.replace_goal(g, &[ng]);
        Ok(())
    }

    /// Proves `ty` in `lctx` with a nested term or tactic block.
    pub(crate) fn prove_sub(&mut self, g: MVarId, ty: &Expr, proof: &Proof, span: Span) -> TResult<Expr> {
        match proof {
            Proof::Term(t) => {
                let ty = ty.clone();
                self.with_elab(g, |el| {
                    let (e, _) = el.elab(t, Some(&ty))?;
                    el.finalize(&e, t.span)
                })
            }
            Proof::Tactics(tacs) => {
                let lctx = self.goal_lctx(g).clone();
                let ng = self.new_goal(ty.clone(), lctx);
                let mut sub = self.clone();
                sub.goals = vec![ng];
                let sub = sub.run_all(tacs)?;
                if !sub.goals.is_empty() {
                    return Err(TacticError::new(
                        TacticErrorKind::UnsolvedGoals,
                        span,
                        format!("unsolved goals\n{}", sub.render_goals()),
                    ));
                }
                self.mctx = sub.mctx;
                self.used_sorry |= sub.used_sorry;
                Ok(self.mctx.instantiate(&mvar(ng)))
            }
        }
    }

    fn have(&mut self, name: &str, ty: &STerm, proof: &Proof, span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let t = self.with_elab(g, |el| {
            let t = el.elab_type(ty)?;
            el.finalize(&t, ty.span)
        })?;
        let v = self.prove_sub(g, &t, proof, span)?;
        let target = self.goal_target(g);
        let mut lctx = self.goal_lctx(g).clone();
        let x = lctx.push_decl(name, t.clone(), None, BinderInfo::Default);
        let decl = lctx.get(x).cloned().expect("just pushed");
        let ng = self.new_goal(target.clone(), lctx);
        let outer = self.goal_lctx(g).clone();
        let f = self.new_goal(pi(Binder::new(name, t), target), outer);
        self.mctx.delay(f, vec![decl], ng);
        self.mctx.assign(g, app(mvar(f), v));
        self.replace_goal(g, &[ng]);
        Ok(())
    }
}

/// `Eq T a b` as its three arguments.
pub fn eq_parts(e: &Expr) -> Option<(Expr, Expr, Expr)> {
    let args = match_const_app(e, "Eq", 3)?;
    let mut it = args.into_iter();
    Some((it.next()?, it.next()?, it.next()?))
}

/// The context with solved metavariables substituted into every entry.
pub fn instantiate_lctx(mctx: &MetaContext, lctx: &LocalContext) -> LocalContext {
    let mut out = LocalContext::new();
    for d in lctx.iter() {
        let mut d = d.clone();
        d.ty = mctx.instantiate(&d.ty);
        d.value = d.value.as_ref().map(|v| mctx.instantiate(v));
        out.push_existing(d);
    }
    out
}
