//! Weak-head normalization and definitional equality.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{KResult, TypeChecker};
use crate::term::*;

/// Literals up to this value are expanded into `Nat.succ` towers when a
/// recursor or a constructor comparison needs one.
pub const NAT_LIT_TOWER_LIMIT: u32 = 16;

/// Largest exponent the literal fast path for `Nat.pow` will compute.
const NAT_POW_LIMIT: u32 = 1 << 16;

impl TypeChecker<'_> {
    /// Head reduction without unfolding definitions: beta, zeta, iota,
    /// metavariable instantiation and the literal fast path.
    pub fn whnf_core(&mut self, e: &Expr) -> KResult<Expr> {
        let mut cur = e.clone();
        loop {
            let next = match &*cur {
                Term::Let(_, v, body) => Some(instantiate(body, v)),
                Term::FVar(id) => self.lctx.get(*id).and_then(|d| d.value.clone()),
                Term::MVar(id) => self.metas.and_then(|m| m.mvar_assignment(*id)),
                Term::App(..) => self.reduce_app(&cur)?,
                _ => None,
            };
            match next {
                Some(n) => {
                    self.tick()?;
                    cur = n;
                }
                None => return Ok(cur),
            }
        }
    }

    fn reduce_app(&mut self, e: &Expr) -> KResult<Option<Expr>> {
        let (head, args) = get_app_fn_args(e);
        match &*head {
            Term::Lam(..) => {
                let mut f = head.clone();
                let mut i = 0;
                while let (Term::Lam(_, body), Some(a)) = (&*f, args.get(i)) {
                    f = instantiate(body, a);
                    i += 1;
                }
                Ok(Some(mk_app(f, args[i..].iter().cloned())))
            }
            Term::MVar(id) => Ok(self
                .metas
                .and_then(|m| m.mvar_assignment(*id))
                .map(|v| mk_app(v, args))),
            Term::Let(..) | Term::FVar(_) => {
                let h = self.whnf_core(&head)?;
                if alpha_eq(&h, &head) {
                    Ok(None)
                } else {
                    Ok(Some(mk_app(h, args)))
                }
            }
            Term::Const(name) => {
                if let Some(r) = self.reduce_nat_op(name, &args)? {
                    return Ok(Some(r));
                }
                self.reduce_recursor(name, &args)
            }
            _ => Ok(None),
        }
    }

    fn reduce_recursor(&mut self, name: &Name, args: &[Expr]) -> KResult<Option<Expr>> {
        let Some(info) = self.env.recursor(name).cloned() else {
            return Ok(None);
        };
        let major_idx = info.major_index();
        let Some(major) = args.get(major_idx) else {
            return Ok(None);
        };
        let mut major = self.whnf(major)?;
        if let Term::NatLit(n) = &*major {
            if info.inductive.as_str() == "Nat" {
                match nat_lit_to_ctor(n) {
                    Some(c) => major = c,
                    None => return Ok(None),
                }
            }
        }
        let (ctor_head, ctor_args) = get_app_fn_args(&major);
        let Term::Const(ctor_name) = &*ctor_head else {
            return Ok(None);
        };
        let Some(rule) = info.rules.iter().find(|r| &r.ctor == ctor_name) else {
            return Ok(None);
        };
        if ctor_args.len() != info.num_params + rule.num_fields {
            return Ok(None);
        }
        let prefix = args[..info.num_params + 1 + info.num_minors].iter().cloned();
        let fields = ctor_args[info.num_params..].iter().cloned();
        let rest = args[major_idx + 1..].iter().cloned();
        Ok(Some(mk_app(mk_app(mk_app(rule.rhs.clone(), prefix), fields), rest)))
    }

    /// Arithmetic on literals for the prelude's computable Nat operations.
    fn reduce_nat_op(&mut self, name: &Name, args: &[Expr]) -> KResult<Option<Expr>> {
        let op = name.as_str();
        if args.len() != 2 || !matches!(op, "Nat.add" | "Nat.sub" | "Nat.mul" | "Nat.pow") {
            return Ok(None);
        }
        if !self.env.get(name).is_some_and(|d| d.is_unfoldable()) {
            return Ok(None);
        }
        let Some(x) = self.eval_nat(&args[0])? else {
            return Ok(None);
        };
        let Some(y) = self.eval_nat(&args[1])? else {
            return Ok(None);
        };
        let r = match op {
            "Nat.add" => x + y,
            "Nat.sub" => {
                if x >= y {
                    x - y
                } else {
                    BigUint::zero()
                }
            }
            "Nat.mul" => x * y,
            _ => match y.to_u32() {
                Some(k) if k <= NAT_POW_LIMIT => x.pow(k),
                _ => return Ok(None),
            },
        };
        Ok(Some(nat_lit(r)))
    }

    /// Value of a closed numeral expression, reducing under `Nat.succ`.
    fn eval_nat(&mut self, e: &Expr) -> KResult<Option<BigUint>> {
        let mut succs = 0u32;
        let mut cur = self.whnf(e)?;
        loop {
            match &*cur {
                Term::NatLit(n) => return Ok(Some(n + succs)),
                Term::Const(c) if c.as_str() == "Nat.zero" => return Ok(Some(BigUint::from(succs))),
                Term::App(f, x) if matches!(&**f, Term::Const(c) if c.as_str() == "Nat.succ") => {
                    succs += 1;
                    cur = self.whnf(x)?;
                }
                _ => return Ok(None),
            }
        }
    }

    fn unfold_definition(&self, e: &Expr) -> Option<Expr> {
        let (head, args) = get_app_fn_args(e);
        let Term::Const(name) = &*head else {
            return None;
        };
        let decl = self.env.get(name)?;
        if !decl.is_unfoldable() {
            return None;
        }
        Some(mk_app(decl.value.clone()?, args))
    }

    pub fn whnf(&mut self, e: &Expr) -> KResult<Expr> {
        let mut cur = e.clone();
        loop {
            cur = self.whnf_core(&cur)?;
            match self.unfold_definition(&cur) {
                Some(next) => {
                    self.tick()?;
                    cur = next;
                }
                None => return Ok(cur),
            }
        }
    }

    pub fn is_def_eq(&mut self, a: &Expr, b: &Expr) -> KResult<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        self.tick()?;
        let mut a = self.whnf_core(a)?;
        let mut b = self.whnf_core(b)?;
        if alpha_eq(&a, &b) {
            return Ok(true);
        }
        if let Some(ta) = self.is_proof(&a)? {
            if let Some(tb) = self.is_proof(&b)? {
                return self.is_def_eq(&ta, &tb);
            }
            return Ok(false);
        }
        // Lazy delta: unfold only when the heads do not already agree.
        loop {
            if same_const_head(&a, &b) && self.args_def_eq(&a, &b)? {
                return Ok(true);
            }
            let ua = self.unfold_definition(&a);
            let ub = self.unfold_definition(&b);
            if ua.is_none() && ub.is_none() {
                break;
            }
            self.tick()?;
            if let Some(x) = ua {
                a = self.whnf_core(&x)?;
            }
            if let Some(y) = ub {
                b = self.whnf_core(&y)?;
            }
            if alpha_eq(&a, &b) {
                return Ok(true);
            }
        }
        self.is_def_eq_whnf(&a, &b)
    }

    fn args_def_eq(&mut self, a: &Expr, b: &Expr) -> KResult<bool> {
        let (_, xs) = get_app_fn_args(a);
        let (_, ys) = get_app_fn_args(b);
        if xs.len() != ys.len() {
            return Ok(false);
        }
        for (x, y) in xs.iter().zip(&ys) {
            if !self.is_def_eq(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn is_def_eq_whnf(&mut self, a: &Expr, b: &Expr) -> KResult<bool> {
        match (&**a, &**b) {
            (Term::Sort(l), Term::Sort(m)) => Ok(l == m),
            (Term::Const(x), Term::Const(y)) => Ok(x == y),
            (Term::FVar(x), Term::FVar(y)) => Ok(x == y),
            (Term::MVar(x), Term::MVar(y)) => Ok(x == y),
            (Term::NatLit(x), Term::NatLit(y)) => Ok(x == y),
            (Term::RatLit(x), Term::RatLit(y)) => Ok(x == y),
            (Term::NatLit(n), _) => match nat_lit_to_ctor(n) {
                Some(c) if !matches!(&**b, Term::NatLit(_)) => self.is_def_eq(&c, b),
                _ => Ok(false),
            },
            (_, Term::NatLit(_)) => self.is_def_eq_whnf(b, a),
            (Term::Lam(b1, e1), Term::Lam(b2, e2)) | (Term::Pi(b1, e1), Term::Pi(b2, e2)) => {
                if !self.is_def_eq(&b1.ty, &b2.ty)? {
                    return Ok(false);
                }
                let (x, e1) = self.open_binder(b1, e1);
                let e2 = instantiate(e2, &fvar(x));
                let r = self.is_def_eq(&e1, &e2);
                self.lctx.pop();
                r
            }
            (Term::App(..), Term::App(..)) => {
                let (f, xs) = get_app_fn_args(a);
                let (g, ys) = get_app_fn_args(b);
                if xs.len() != ys.len() || !self.is_def_eq(&f, &g)? {
                    return Ok(false);
                }
                for (x, y) in xs.iter().zip(&ys) {
                    if !self.is_def_eq(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Term::Cert(p), Term::Cert(q)) => self.is_def_eq(p, q),
            _ => Ok(false),
        }
    }
}

fn same_const_head(a: &Expr, b: &Expr) -> bool {
    matches!(
        (&**get_app_fn(a), &**get_app_fn(b)),
        (Term::Const(x), Term::Const(y)) if x == y
    ) && matches!(&**a, Term::App(..))
}

/// `NatLit n` as `Nat.zero` or `Nat.succ (NatLit (n - 1))`, within the tower limit.
pub fn nat_lit_to_ctor(n: &BigUint) -> Option<Expr> {
    if n.is_zero() {
        return Some(cnst("Nat.zero"));
    }
    if n > &BigUint::from(NAT_LIT_TOWER_LIMIT) {
        return None;
    }
    Some(app(cnst("Nat.succ"), nat_lit(n - 1u32)))
}

/// Value of a numeral written as a literal or a constructor tower.
pub fn nat_value(e: &Expr) -> Option<BigUint> {
    match &**e {
        Term::NatLit(n) => Some(n.clone()),
        Term::Const(c) if c.as_str() == "Nat.zero" => Some(BigUint::zero()),
        Term::App(f, x) if matches!(&**f, Term::Const(c) if c.as_str() == "Nat.succ") => {
            nat_value(x).map(|v| v + 1u32)
        }
        _ => None,
    }
}
