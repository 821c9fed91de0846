//! Kernel terms.
//!
//! Terms use a locally nameless representation: variables bound by a
//! `Lam`/`Pi`/`Let` are de Bruijn indices (`BVar`, innermost binder is 0),
//! while variables living in a [`LocalContext`] are `FVar`s with globally
//! unique ids. Binder names are display-only.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;

/// A hierarchical constant name such as `Nat.succ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `Nat` + `rec` = `Nat.rec`.
    pub fn child(&self, last: &str) -> Name {
        Name::new(&format!("{}.{}", self.0, last))
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}", self.0)
    }
}

/// Universe level: 0 is `Prop`, `n + 1` is `Type n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub u32);

impl Level {
    pub const PROP: Level = Level(0);
    pub const TYPE: Level = Level(1);

    pub fn succ(self) -> Level {
        Level(self.0 + 1)
    }

    pub fn is_prop(self) -> bool {
        self.0 == 0
    }

    /// Sort of a Pi whose domain lives in `self` and codomain in `body`:
    /// impredicative when the codomain is a proposition.
    pub fn imax(self, body: Level) -> Level {
        if body.is_prop() {
            body
        } else {
            Level(self.0.max(body.0))
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVarId(pub u64);

impl FVarId {
    pub fn fresh() -> FVarId {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        FVarId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MVarId(pub u64);

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum BinderInfo {
    #[default]
    Default,
    Implicit,
}

#[derive(Clone, Debug)]
pub struct Binder {
    pub name: String,
    pub ty: Expr,
    pub info: BinderInfo,
}

impl Binder {
    pub fn new(name: impl Into<String>, ty: Expr) -> Self {
        Binder {
            name: name.into(),
            ty,
            info: BinderInfo::Default,
        }
    }

    pub fn implicit(name: impl Into<String>, ty: Expr) -> Self {
        Binder {
            name: name.into(),
            ty,
            info: BinderInfo::Implicit,
        }
    }

    fn with_ty(&self, ty: Expr) -> Binder {
        Binder {
            name: self.name.clone(),
            ty,
            info: self.info,
        }
    }
}

pub type Expr = Arc<Term>;

#[derive(Clone, Debug)]
pub enum Term {
    BVar(u32),
    FVar(FVarId),
    /// Elaboration-time hole; never admitted by the kernel.
    MVar(MVarId),
    Sort(Level),
    Const(Name),
    App(Expr, Expr),
    Lam(Binder, Expr),
    Pi(Binder, Expr),
    Let(Binder, Expr, Expr),
    NatLit(BigUint),
    RatLit(BigRational),
    /// Trusted arithmetic certificate: proves the closed literal proposition
    /// it wraps, which the kernel re-evaluates before accepting.
    Cert(Expr),
}

pub fn bvar(i: u32) -> Expr {
    Arc::new(Term::BVar(i))
}

pub fn fvar(id: FVarId) -> Expr {
    Arc::new(Term::FVar(id))
}

pub fn mvar(id: MVarId) -> Expr {
    Arc::new(Term::MVar(id))
}

pub fn sort(l: Level) -> Expr {
    Arc::new(Term::Sort(l))
}

pub fn prop() -> Expr {
    sort(Level::PROP)
}

pub fn type0() -> Expr {
    sort(Level::TYPE)
}

pub fn cnst(name: impl Into<Name>) -> Expr {
    Arc::new(Term::Const(name.into()))
}

pub fn app(f: Expr, a: Expr) -> Expr {
    Arc::new(Term::App(f, a))
}

pub fn mk_app(f: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
    args.into_iter().fold(f, app)
}

pub fn lam(b: Binder, body: Expr) -> Expr {
    Arc::new(Term::Lam(b, body))
}

pub fn pi(b: Binder, body: Expr) -> Expr {
    Arc::new(Term::Pi(b, body))
}

/// Non-dependent arrow `a → b`; `b` must not refer to the new binder.
pub fn arrow(a: Expr, b: Expr) -> Expr {
    pi(Binder::new("a", a), lift_loose(&b, 0, 1))
}

pub fn let_(b: Binder, value: Expr, body: Expr) -> Expr {
    Arc::new(Term::Let(b, value, body))
}

pub fn nat_lit(n: impl Into<BigUint>) -> Expr {
    Arc::new(Term::NatLit(n.into()))
}

pub fn rat_lit(q: BigRational) -> Expr {
    Arc::new(Term::RatLit(q))
}

pub fn cert(p: Expr) -> Expr {
    Arc::new(Term::Cert(p))
}

/// Splits `f a1 .. an` into `f` and `[a1, .., an]`.
pub fn get_app_fn_args(e: &Expr) -> (Expr, Vec<Expr>) {
    let mut args = Vec::new();
    let mut cur = e;
    while let Term::App(f, a) = &**cur {
        args.push(a.clone());
        cur = f;
    }
    args.reverse();
    (cur.clone(), args)
}

pub fn get_app_fn(e: &Expr) -> &Expr {
    let mut cur = e;
    while let Term::App(f, _) = &**cur {
        cur = f;
    }
    cur
}

pub fn const_name(e: &Expr) -> Option<&Name> {
    match &**e {
        Term::Const(n) => Some(n),
        _ => None,
    }
}

/// If `e` is `c a1 .. an` with `c` the named constant and exactly `n` args.
pub fn match_const_app(e: &Expr, name: &str, n: usize) -> Option<Vec<Expr>> {
    let (f, args) = get_app_fn_args(e);
    match &*f {
        Term::Const(c) if c.as_str() == name && args.len() == n => Some(args),
        _ => None,
    }
}

/// One past the largest loose bound variable index (0 if closed).
pub fn loose_bvar_range(e: &Expr) -> u32 {
    match &**e {
        Term::BVar(i) => i + 1,
        Term::App(f, a) => loose_bvar_range(f).max(loose_bvar_range(a)),
        Term::Lam(b, body) | Term::Pi(b, body) => {
            loose_bvar_range(&b.ty).max(loose_bvar_range(body).saturating_sub(1))
        }
        Term::Let(b, v, body) => loose_bvar_range(&b.ty)
            .max(loose_bvar_range(v))
            .max(loose_bvar_range(body).saturating_sub(1)),
        Term::Cert(p) => loose_bvar_range(p),
        _ => 0,
    }
}

pub fn has_loose_bvars(e: &Expr) -> bool {
    loose_bvar_range(e) > 0
}

/// Does bound variable `i` (relative to `e`) occur in `e`?
pub fn has_loose_bvar(e: &Expr, i: u32) -> bool {
    match &**e {
        Term::BVar(j) => *j == i,
        Term::App(f, a) => has_loose_bvar(f, i) || has_loose_bvar(a, i),
        Term::Lam(b, body) | Term::Pi(b, body) => {
            has_loose_bvar(&b.ty, i) || has_loose_bvar(body, i + 1)
        }
        Term::Let(b, v, body) => {
            has_loose_bvar(&b.ty, i) || has_loose_bvar(v, i) || has_loose_bvar(body, i + 1)
        }
        Term::Cert(p) => has_loose_bvar(p, i),
        _ => false,
    }
}

/// Rebuilds `e` top-down; `f` receives each subterm with the number of
/// binders crossed and may return a replacement (which is not revisited).
pub fn replace<F>(e: &Expr, f: &mut F) -> Expr
where
    F: FnMut(&Expr, u32) -> Option<Expr>,
{
    replace_at(e, 0, f)
}

fn replace_at<F>(e: &Expr, depth: u32, f: &mut F) -> Expr
where
    F: FnMut(&Expr, u32) -> Option<Expr>,
{
    if let Some(r) = f(e, depth) {
        return r;
    }
    match &**e {
        Term::App(g, a) => {
            let g2 = replace_at(g, depth, f);
            let a2 = replace_at(a, depth, f);
            if Arc::ptr_eq(&g2, g) && Arc::ptr_eq(&a2, a) {
                e.clone()
            } else {
                app(g2, a2)
            }
        }
        Term::Lam(b, body) => {
            let ty = replace_at(&b.ty, depth, f);
            let body2 = replace_at(body, depth + 1, f);
            if Arc::ptr_eq(&ty, &b.ty) && Arc::ptr_eq(&body2, body) {
                e.clone()
            } else {
                lam(b.with_ty(ty), body2)
            }
        }
        Term::Pi(b, body) => {
            let ty = replace_at(&b.ty, depth, f);
            let body2 = replace_at(body, depth + 1, f);
            if Arc::ptr_eq(&ty, &b.ty) && Arc::ptr_eq(&body2, body) {
                e.clone()
            } else {
                pi(b.with_ty(ty), body2)
            }
        }
        Term::Let(b, v, body) => {
            let ty = replace_at(&b.ty, depth, f);
            let v2 = replace_at(v, depth, f);
            let body2 = replace_at(body, depth + 1, f);
            let_(b.with_ty(ty), v2, body2)
        }
        Term::Cert(p) => cert(replace_at(p, depth, f)),
        _ => e.clone(),
    }
}

/// Adds `amount` to every bound variable `>= offset`.
pub fn lift_loose(e: &Expr, offset: u32, amount: u32) -> Expr {
    if amount == 0 || loose_bvar_range(e) <= offset {
        return e.clone();
    }
    replace(e, &mut |t, d| match &**t {
        Term::BVar(i) if *i >= offset + d => Some(bvar(i + amount)),
        _ => None,
    })
}

/// Substitutes `arg` for bound variable 0 of a binder body, lowering the
/// remaining loose indices by one.
pub fn instantiate(body: &Expr, arg: &Expr) -> Expr {
    instantiate_rev(body, std::slice::from_ref(arg))
}

/// Substitutes `subst[n - 1 - i]` for bound variable `i` (`i < n`); the
/// last element replaces the innermost binder.
pub fn instantiate_rev(body: &Expr, subst: &[Expr]) -> Expr {
    let n = subst.len() as u32;
    if n == 0 || !has_loose_bvars(body) {
        return body.clone();
    }
    replace(body, &mut |t, d| match &**t {
        Term::BVar(i) if *i >= d => {
            let k = i - d;
            if k < n {
                Some(lift_loose(&subst[(n - 1 - k) as usize], 0, d))
            } else {
                Some(bvar(i - n))
            }
        }
        _ if loose_bvar_range(t) <= d => Some(t.clone()),
        _ => None,
    })
}

/// Replaces `fvars[i]` by the bound variable referring to the `i`-th of
/// `fvars.len()` binders that will be wrapped around the result.
pub fn abstract_fvars(e: &Expr, fvars: &[FVarId]) -> Expr {
    if fvars.is_empty() {
        return e.clone();
    }
    let n = fvars.len() as u32;
    replace(e, &mut |t, d| match &**t {
        Term::FVar(id) => fvars
            .iter()
            .rposition(|x| x == id)
            .map(|pos| bvar(d + n - 1 - pos as u32)),
        _ => None,
    })
}

pub fn has_fvar(e: &Expr, id: FVarId) -> bool {
    find(e, &mut |t| matches!(&**t, Term::FVar(x) if *x == id))
}

pub fn has_mvars(e: &Expr) -> bool {
    find(e, &mut |t| matches!(&**t, Term::MVar(_)))
}

pub fn has_const(e: &Expr, name: &Name) -> bool {
    find(e, &mut |t| matches!(&**t, Term::Const(c) if c == name))
}

/// Pre-order search for a subterm satisfying `p`.
pub fn find<P>(e: &Expr, p: &mut P) -> bool
where
    P: FnMut(&Expr) -> bool,
{
    if p(e) {
        return true;
    }
    match &**e {
        Term::App(f, a) => find(f, p) || find(a, p),
        Term::Lam(b, body) | Term::Pi(b, body) => find(&b.ty, p) || find(body, p),
        Term::Let(b, v, body) => find(&b.ty, p) || find(v, p) || find(body, p),
        Term::Cert(q) => find(q, p),
        _ => false,
    }
}

/// Structural equality ignoring binder display names.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    match (&**a, &**b) {
        (Term::BVar(i), Term::BVar(j)) => i == j,
        (Term::FVar(i), Term::FVar(j)) => i == j,
        (Term::MVar(i), Term::MVar(j)) => i == j,
        (Term::Sort(l), Term::Sort(m)) => l == m,
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(f, x), Term::App(g, y)) => alpha_eq(f, g) && alpha_eq(x, y),
        (Term::Lam(b1, e1), Term::Lam(b2, e2)) | (Term::Pi(b1, e1), Term::Pi(b2, e2)) => {
            b1.info == b2.info && alpha_eq(&b1.ty, &b2.ty) && alpha_eq(e1, e2)
        }
        (Term::Let(b1, v1, e1), Term::Let(b2, v2, e2)) => {
            alpha_eq(&b1.ty, &b2.ty) && alpha_eq(v1, v2) && alpha_eq(e1, e2)
        }
        (Term::NatLit(x), Term::NatLit(y)) => x == y,
        (Term::RatLit(x), Term::RatLit(y)) => x == y,
        (Term::Cert(p), Term::Cert(q)) => alpha_eq(p, q),
        _ => false,
    }
}

/// Number of nodes; used for fuel heuristics and tests.
pub fn size(e: &Expr) -> usize {
    match &**e {
        Term::App(f, a) => 1 + size(f) + size(a),
        Term::Lam(b, body) | Term::Pi(b, body) => 1 + size(&b.ty) + size(body),
        Term::Let(b, v, body) => 1 + size(&b.ty) + size(v) + size(body),
        Term::Cert(p) => 1 + size(p),
        _ => 1,
    }
}

#[derive(Clone, Debug)]
pub struct LocalDecl {
    pub fvar: FVarId,
    pub user_name: String,
    pub ty: Expr,
    pub value: Option<Expr>,
    pub info: BinderInfo,
}

/// Ordered hypotheses; each entry may mention only earlier entries.
#[derive(Clone, Debug, Default)]
pub struct LocalContext {
    decls: Vec<LocalDecl>,
}

impl LocalContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, user_name: impl Into<String>, ty: Expr) -> FVarId {
        self.push_decl(user_name, ty, None, BinderInfo::Default)
    }

    pub fn push_decl(
        &mut self,
        user_name: impl Into<String>,
        ty: Expr,
        value: Option<Expr>,
        info: BinderInfo,
    ) -> FVarId {
        let fvar = FVarId::fresh();
        self.decls.push(LocalDecl {
            fvar,
            user_name: user_name.into(),
            ty,
            value,
            info,
        });
        fvar
    }

    /// Re-enters a declaration created elsewhere, keeping its id.
    pub fn push_existing(&mut self, decl: LocalDecl) {
        self.decls.push(decl);
    }

    pub fn pop(&mut self) -> Option<LocalDecl> {
        self.decls.pop()
    }

    pub fn truncate(&mut self, len: usize) {
        self.decls.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn get(&self, id: FVarId) -> Option<&LocalDecl> {
        self.decls.iter().rev().find(|d| d.fvar == id)
    }

    /// Latest hypothesis with the given user name.
    pub fn find_by_name(&self, name: &str) -> Option<&LocalDecl> {
        self.decls.iter().rev().find(|d| d.user_name == name)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &LocalDecl> {
        self.decls.iter()
    }

    pub fn decls(&self) -> &[LocalDecl] {
        &self.decls
    }
}

/// Wraps `body` in Pi binders for `decls` (let-decls become `let`).
pub fn mk_pi(decls: &[LocalDecl], body: &Expr) -> Expr {
    mk_binding(true, decls, body)
}

/// Wraps `body` in lambdas for `decls` (let-decls become `let`).
pub fn mk_lambda(decls: &[LocalDecl], body: &Expr) -> Expr {
    mk_binding(false, decls, body)
}

fn mk_binding(is_pi: bool, decls: &[LocalDecl], body: &Expr) -> Expr {
    let fvars: Vec<FVarId> = decls.iter().map(|d| d.fvar).collect();
    let mut result = abstract_fvars(body, &fvars);
    for (i, d) in decls.iter().enumerate().rev() {
        let ty = abstract_fvars(&d.ty, &fvars[..i]);
        let binder = Binder {
            name: d.user_name.clone(),
            ty,
            info: d.info,
        };
        result = match &d.value {
            Some(v) => let_(binder, abstract_fvars(v, &fvars[..i]), result),
            None if is_pi => pi(binder, result),
            None => lam(binder, result),
        };
    }
    result
}
