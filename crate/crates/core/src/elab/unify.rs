//! First-order unification modulo definitional unfolding.

use num_traits::{One, Zero};

use super::meta::{MetaContext, MetaKind};
use crate::env::Environment;
use crate::kernel::TypeChecker;
use crate::term::*;

const UNIFY_FUEL: u32 = 20_000;

/// Unifies `a` and `b`, returning the extended context on success.
pub fn unify(env: &Environment, lctx: &LocalContext, a: &Expr, b: &Expr, mctx: &MetaContext) -> Option<MetaContext> {
    let mut m = mctx.clone();
    Unifier::new(env, lctx, &mut m).unify(a, b).then_some(m)
}

pub struct Unifier<'a> {
    env: &'a Environment,
    lctx: LocalContext,
    mctx: &'a mut MetaContext,
    trail: Vec<MVarId>,
    fuel: u32,
}

impl<'a> Unifier<'a> {
    pub fn new(env: &'a Environment, lctx: &LocalContext, mctx: &'a mut MetaContext) -> Self {
        Unifier {
            env,
            lctx: lctx.clone(),
            mctx,
            trail: Vec::new(),
            fuel: UNIFY_FUEL,
        }
    }

    /// All-or-nothing: on failure no assignment survives.
    pub fn unify(&mut self, a: &Expr, b: &Expr) -> bool {
        let mark = self.trail.len();
        let ok = self.go(a, b);
        if !ok {
            self.rollback(mark);
        }
        ok
    }

    fn rollback(&mut self, mark: usize) {
        for m in self.trail.drain(mark..) {
            self.mctx.unassign(m);
        }
    }

    fn checker(&self, lctx: LocalContext) -> TypeChecker<'_> {
        TypeChecker::with_context(self.env, lctx).with_metas(&*self.mctx)
    }

    fn unassigned_mvar(&self, e: &Expr) -> Option<MVarId> {
        match &**e {
            Term::MVar(m) if !self.mctx.is_assigned(*m) => Some(*m),
            _ => None,
        }
    }

    fn go(&mut self, a: &Expr, b: &Expr) -> bool {
        if self.fuel == 0 {
            return false;
        }
        self.fuel -= 1;
        let a = self.mctx.instantiate(a);
        let b = self.mctx.instantiate(b);
        if alpha_eq(&a, &b) {
            return true;
        }
        if let Some(m) = self.unassigned_mvar(&a) {
            if self.assign(m, &b) {
                return true;
            }
        }
        if let Some(m) = self.unassigned_mvar(&b) {
            if self.assign(m, &a) {
                return true;
            }
        }
        match (&*a, &*b) {
            (Term::Sort(x), Term::Sort(y)) => return x == y,
            (Term::Pi(b1, body1), Term::Pi(b2, body2)) | (Term::Lam(b1, body1), Term::Lam(b2, body2)) => {
                if !self.go(&b1.ty, &b2.ty) {
                    return false;
                }
                let x = self.lctx.push_decl(b1.name.clone(), b1.ty.clone(), None, b1.info);
                let r = self.go(&instantiate(body1, &fvar(x)), &instantiate(body2, &fvar(x)));
                self.lctx.pop();
                return r;
            }
            (Term::App(..), Term::App(..)) => {
                let (f1, args1) = get_app_fn_args(&a);
                let (f2, args2) = get_app_fn_args(&b);
                let flex = self.unassigned_mvar(&f1).is_some() || self.unassigned_mvar(&f2).is_some();
                if flex {
                    // Higher-order: out of the first-order fragment.
                    return false;
                }
                if args1.len() == args2.len() {
                    let mark = self.trail.len();
                    if self.go(&f1, &f2) && args1.iter().zip(&args2).all(|(x, y)| self.go(x, y)) {
                        return true;
                    }
                    self.rollback(mark);
                }
            }
            _ => {}
        }
        if let Some(r) = self.literal_succ(&a, &b) {
            return r;
        }
        if !has_mvars(&a) && !has_mvars(&b) {
            let mut tc = self.checker(self.lctx.clone());
            return tc.is_def_eq(&a, &b).unwrap_or(false);
        }
        let (wa, wb) = {
            let mut tc = self.checker(self.lctx.clone());
            match (tc.whnf(&a), tc.whnf(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => return false,
            }
        };
        if !alpha_eq(&wa, &a) || !alpha_eq(&wb, &b) {
            return self.go(&wa, &wb);
        }
        self.proof_irrelevant(&a, &b)
    }

    /// `n+1 =?= Nat.succ t` reduces to `n =?= t`.
    fn literal_succ(&mut self, a: &Expr, b: &Expr) -> Option<bool> {
        let (lit, other) = match (&**a, &**b) {
            (Term::NatLit(n), _) => (n, b),
            (_, Term::NatLit(n)) => (n, a),
            _ => return None,
        };
        let arg = match_const_app(other, "Nat.succ", 1)?;
        if lit.is_zero() {
            return Some(false);
        }
        let pred = nat_lit(lit - num_bigint::BigUint::one());
        Some(self.go(&pred, &arg[0]))
    }

    fn proof_irrelevant(&mut self, a: &Expr, b: &Expr) -> bool {
        let mut tc = self.checker(self.lctx.clone());
        let (Ok(Some(ta)), Ok(Some(tb))) = (tc.is_proof(a), tc.is_proof(b)) else {
            return false;
        };
        self.go(&ta, &tb)
    }

    fn assign(&mut self, m: MVarId, v: &Expr) -> bool {
        let decl = self.mctx.decl(m);
        if decl.kind != MetaKind::Natural {
            return false;
        }
        if find(v, &mut |t| matches!(&**t, Term::MVar(n) if *n == m)) {
            return false;
        }
        let scope = decl.lctx.clone();
        let escapes = find(v, &mut |t| matches!(&**t, Term::FVar(id) if scope.get(*id).is_none()));
        if escapes || has_loose_bvars(v) {
            return false;
        }
        let mty = decl.ty.clone();
        let vty = match self.checker(scope).infer(v) {
            Ok(t) => t,
            Err(_) => return false,
        };
        self.mctx.assign(m, v.clone());
        self.trail.push(m);
        let mark = self.trail.len();
        if self.go(&mty, &vty) {
            true
        } else {
            self.rollback(mark - 1);
            false
        }
    }
}
