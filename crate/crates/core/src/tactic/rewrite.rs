//! `rw` and `simp`: rewriting the goal with equations via `Eq.rec`.

use std::collections::HashSet;

use super::*;
use crate::syntax::ast::{RwRule, STermKind};

/// Lemmas `simp` uses unless called as `simp only`.
pub const SIMP_DEFAULTS: &[&str] = &[
    "one_mul",
    "mul_one",
    "add_zero",
    "zero_add",
    "Rat.one_mul",
    "Rat.mul_one",
    "Rat.add_zero",
    "Rat.zero_add",
    "Nat.one_mul",
    "Nat.mul_one",
    "Nat.add_zero",
    "Nat.zero_add",
];

/// Outcome of one rewrite of goal `g`.
pub(crate) struct Rewritten {
    pub goal: MVarId,
    /// Hypotheses of the equation left unsolved by matching.
    pub side: Vec<MVarId>,
}

fn head_key(e: &Expr) -> Option<(Expr, usize)> {
    let (f, args) = get_app_fn_args(e);
    match &*f {
        Term::Const(_) | Term::FVar(_) => Some((f, args.len())),
        _ => None,
    }
}

impl ProofState {
    pub(super) fn rw(&mut self, rules: &[RwRule], span: Span) -> TResult<()> {
        for rule in rules {
            let g = self.main_goal(span)?;
            let r = self.rewrite_once(g, &rule.term, rule.reverse)?;
            let Some(r) = r else {
                let pat = self.rw_pattern_text(g, &rule.term, rule.reverse);
                return Err(TacticError::new(
                    TacticErrorKind::RwNoMatch,
                    rule.term.span,
                    format!(
                        "did not find instance of the pattern in the target expression\n  {}\n{}",
                        pat,
                        self.render_goal(g)
                    ),
                ));
            };
            let mut new = vec![r.goal];
            new.extend(r.side);
            self.replace_goal(g, &new);
        }
        if let Ok(g) = self.main_goal(span) {
            let saved = self.mctx.clone();
            if !self.try_rfl(g) {
                self.mctx = saved;
            }
        }
        Ok(())
    }

    fn rw_pattern_text(&mut self, g: MVarId, t: &STerm, reverse: bool) -> String {
        let mut s = self.clone();
        match s.instantiate_equation(g, t, t.span) {
            Ok((_, _, l, r, _)) => s.render_in(g, if reverse { &r } else { &l }),
            Err(_) => String::from("?"),
        }
    }

    /// Elaborates an equation proof and opens its binders with fresh
    /// metavariables: `(proof, T, lhs, rhs, new mvars)`.
    fn instantiate_equation(&mut self, g: MVarId, t: &STerm, span: Span) -> TResult<(Expr, Expr, Expr, Expr, Vec<MVarId>)> {
        let before = self.mctx.len();
        let (mut h, mut ty) = self.with_elab(g, |el| {
            let (h, ty) = el.elab(t, None)?;
            el.synthesize(0, true)?;
            Ok((h, ty))
        })?;
        let lctx = self.goal_lctx(g).clone();
        let mut fresh = Vec::new();
        loop {
            ty = self.mctx.instantiate(&ty);
            if let Some((et, l, r)) = eq_parts(&ty) {
                let created = (before..self.mctx.len()).map(|i| MVarId(i as u64));
                let mut all: Vec<MVarId> = created.collect();
                all.retain(|m| !fresh.contains(m));
                all.extend(fresh);
                return Ok((h, et, l, r, all));
            }
            let w = match &*ty {
                Term::Pi(..) => ty.clone(),
                _ => self.whnf_in(g, &ty),
            };
            match &*w {
                Term::Pi(b, body) if eq_parts(&w).is_none() => {
                    let m = self.mctx.new_mvar(b.ty.clone(), lctx.clone(), Some(span), MetaKind::Natural);
                    fresh.push(m);
                    h = app(h, mvar(m));
                    ty = instantiate(body, &mvar(m));
                }
                _ if eq_parts(&w).is_some() => ty = w,
                _ => {
                    return Err(TacticError::new(
                        TacticErrorKind::Failed,
                        span,
                        format!("rewrite failed: equality expected, got {}", self.render_in(g, &ty)),
                    ))
                }
            }
        }
    }

    /// Rewrites the first match of the equation in `g`'s target, replacing
    /// every occurrence of the instantiated side. `Ok(None)` if nothing matches.
    pub(crate) fn rewrite_once(&mut self, g: MVarId, t: &STerm, reverse: bool) -> TResult<Option<Rewritten>> {
        let (h, ty, l, r, fresh) = self.instantiate_equation(g, t, t.span)?;
        let (from, to) = if reverse { (r.clone(), l.clone()) } else { (l.clone(), r.clone()) };
        let target = self.goal_target(g);
        if !self.find_instance(g, &target, &from) {
            return Ok(None);
        }
        let from = self.mctx.instantiate(&from);
        let to = self.mctx.instantiate(&to);
        let ty = self.mctx.instantiate(&ty);
        let body = replace(&target, &mut |e, depth| {
            alpha_eq(e, &from).then(|| bvar(depth))
        });
        let motive = lam(
            Binder::new("x", ty.clone()),
            lam(
                Binder::new("h", mk_app(cnst("Eq"), [ty.clone(), to.clone(), bvar(0)])),
                lift_loose(&body, 0, 1),
            ),
        );
        let lctx = self.goal_lctx(g).clone();
        let motive_ok = {
            let mut tc = TypeChecker::with_context(&self.env, lctx.clone()).with_metas(&self.mctx);
            tc.infer(&motive).is_ok()
        };
        if !motive_ok {
            return Err(TacticError::new(
                TacticErrorKind::RwMotiveIllTyped,
                t.span,
                format!(
                    "motive is not type correct when abstracting {}",
                    self.render_in(g, &from)
                ),
            ));
        }
        let new_target = instantiate(&body, &to);
        let ng = self.new_goal(new_target, lctx);
        let h = self.mctx.instantiate(&h);
        // `to = from`, as Eq.rec needs it
        let back = if reverse {
            h
        } else {
            mk_app(cnst("Eq.symm"), [ty.clone(), from.clone(), to.clone(), h])
        };
        let pf = mk_app(cnst("Eq.rec"), [ty, to, motive, mvar(ng), from, back]);
        self.mctx.assign(g, pf);
        let side = fresh.into_iter().filter(|m| !self.mctx.is_assigned(*m)).collect();
        Ok(Some(Rewritten { goal: ng, side }))
    }

    /// Leftmost-outermost subterm of `e` unifying with `pat`; on success the
    /// pattern's metavariables stay assigned.
    fn find_instance(&mut self, g: MVarId, e: &Expr, pat: &Expr) -> bool {
        let pat = self.mctx.instantiate(pat);
        let key = head_key(&pat);
        let mut candidates = Vec::new();
        collect_subterms(e, &mut candidates);
        for c in candidates {
            if has_loose_bvars(&c) {
                continue;
            }
            if let Some((kf, kn)) = &key {
                match head_key(&c) {
                    Some((cf, cn)) if cn == *kn && alpha_eq(&cf, kf) => {}
                    _ => continue,
                }
            }
            if self.unify_in(g, &pat, &c) {
                return true;
            }
        }
        false
    }

    pub(super) fn simp(&mut self, only: bool, lemmas: &[STerm], span: Span) -> TResult<()> {
        let g0 = self.main_goal(span)?;
        let mut rules: Vec<STerm> = lemmas.to_vec();
        if !only {
            for name in SIMP_DEFAULTS {
                if self.env.contains(&Name::new(name)) {
                    rules.push(STerm::new(STermKind::Ident(name.to_string()), span));
                }
            }
        }
        let (g, progressed) = self.rewrite_exhaustively(g0, &rules, None, span)?;
        if self.try_rfl(g) {
            return Ok(());
        }
        if !progressed {
            return Err(TacticError::new(
                TacticErrorKind::Failed,
                span,
                format!("simp made no progress\n{}", self.render_goal(g)),
            ));
        }
        Ok(())
    }

    /// Rewrites `g` with `rules` until none applies. Side conditions are
    /// discharged by `norm_num` at the given depth, or the rewrite is skipped.
    pub(crate) fn rewrite_exhaustively(
        &mut self,
        g0: MVarId,
        rules: &[STerm],
        discharge_depth: Option<u32>,
        span: Span,
    ) -> TResult<(MVarId, bool)> {
        let mut g = g0;
        let mut seen = HashSet::new();
        seen.insert(format!("{:?}", self.goal_target(g)));
        let mut steps = 0;
        let mut progressed = false;
        'outer: loop {
            for rule in rules {
                let mut trial = self.clone();
                let Ok(Some(r)) = trial.rewrite_once(g, rule, false) else {
                    continue;
                };
                let key = format!("{:?}", trial.goal_target(r.goal));
                if seen.contains(&key) {
                    continue;
                }
                let mut discharged = true;
                for m in &r.side {
                    if trial.mctx.is_assigned(*m) {
                        continue;
                    }
                    let is_prop = trial.is_prop_in(r.goal, &trial.mctx.decl(*m).ty.clone());
                    let ok = match discharge_depth {
                        Some(d) if is_prop => {
                            let mut sub = trial.clone();
                            let res = sub.norm_num(*m, rules, d + 1, span);
                            if res.is_ok() {
                                trial.mctx = sub.mctx;
                                trial.used_sorry |= sub.used_sorry;
                            }
                            res.is_ok()
                        }
                        _ => false,
                    };
                    if !ok {
                        discharged = false;
                        break;
                    }
                }
                if !discharged {
                    continue;
                }
                trial.replace_goal(g, &[r.goal]);
                *self = trial;
                g = r.goal;
                seen.insert(key);
                progressed = true;
                steps += 1;
                if steps >= SIMP_FUEL {
                    return Err(TacticError::new(
                        TacticErrorKind::Failed,
                        span,
                        format!("rewriting fuel exhausted after {SIMP_FUEL} steps"),
                    ));
                }
                continue 'outer;
            }
            break;
        }
        Ok((g, progressed))
    }

    pub(crate) fn is_prop_in(&self, g: MVarId, ty: &Expr) -> bool {
        let mut tc = TypeChecker::with_context(&self.env, self.goal_lctx(g).clone()).with_metas(&self.mctx);
        match tc.infer(ty).and_then(|s| tc.whnf(&s)) {
            Ok(s) => matches!(&*s, Term::Sort(l) if l.is_prop()),
            Err(_) => false,
        }
    }
}

/// Subterms in pre-order, function before arguments.
fn collect_subterms(e: &Expr, out: &mut Vec<Expr>) {
    out.push(e.clone());
    match &**e {
        Term::App(..) => {
            let (f, args) = get_app_fn_args(e);
            if !matches!(&*f, Term::Const(_) | Term::FVar(_) | Term::MVar(_)) {
                collect_subterms(&f, out);
            }
            for a in &args {
                collect_subterms(a, out);
            }
        }
        Term::Lam(b, body) | Term::Pi(b, body) => {
            collect_subterms(&b.ty, out);
            collect_subterms(body, out);
        }
        Term::Let(b, v, body) => {
            collect_subterms(&b.ty, out);
            collect_subterms(v, out);
            collect_subterms(body, out);
        }
        _ => {}
    }
}
