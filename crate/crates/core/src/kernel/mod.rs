//! The trusted core: type inference, definitional equality, and admission of
//! declarations into an [`Environment`].

pub mod arith;
mod inductive;
mod reduce;

use thiserror::Error;

use crate::env::{DeclKind, Declaration, Environment};
use crate::syntax::pretty;
use crate::term::*;

pub use inductive::{mk_recursor, InductiveSpec};

/// Default number of reduction steps before a check gives up.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("type mismatch: expected {expected}, got {actual}{}", location_suffix(.location))]
    TypeMismatch {
        expected: String,
        actual: String,
        location: Option<String>,
    },
    #[error("unknown constant '{0}'")]
    UnknownConstant(Name),
    #[error("unknown free variable")]
    UnknownFVar,
    #[error("function expected, '{term}' has type {ty}")]
    NotAFunction { term: String, ty: String },
    #[error("type expected, '{term}' has type {ty}")]
    NotAType { term: String, ty: String },
    #[error("'{0}' has already been declared")]
    DuplicateName(Name),
    #[error("non-positive occurrence of '{inductive}' in constructor '{ctor}': {reason}")]
    PositivityViolation {
        inductive: Name,
        ctor: Name,
        reason: String,
    },
    #[error("invalid inductive declaration '{0}': {1}")]
    InvalidInductive(Name, String),
    #[error("'{0}' may only eliminate into Prop")]
    LargeElimination(Name),
    #[error("deterministic timeout: reduction fuel exhausted")]
    FuelExhausted,
    #[error("unexpected bound variable")]
    LooseBVar,
    #[error("unexpected metavariable in kernel term")]
    UnexpectedMVar,
    #[error("declaration type must be closed")]
    NotClosed,
    #[error("invalid arithmetic certificate: {0}")]
    InvalidCertificate(String),
}

fn location_suffix(loc: &Option<String>) -> String {
    match loc {
        Some(l) => format!(" at {l}"),
        None => String::new(),
    }
}

pub type KResult<T> = Result<T, KernelError>;

/// Read access to elaboration metavariables. The kernel itself never sees
/// metavariables; the elaborator reuses the checker with a view installed.
pub trait MetaView {
    fn mvar_type(&self, id: MVarId) -> Option<Expr>;
    fn mvar_assignment(&self, id: MVarId) -> Option<Expr>;
}

pub struct TypeChecker<'a> {
    pub(crate) env: &'a Environment,
    pub(crate) lctx: LocalContext,
    pub(crate) metas: Option<&'a dyn MetaView>,
    fuel: u64,
}

impl<'a> TypeChecker<'a> {
    pub fn new(env: &'a Environment) -> Self {
        Self::with_context(env, LocalContext::new())
    }

    pub fn with_context(env: &'a Environment, lctx: LocalContext) -> Self {
        TypeChecker {
            env,
            lctx,
            metas: None,
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn with_metas(mut self, metas: &'a dyn MetaView) -> Self {
        self.metas = Some(metas);
        self
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn env(&self) -> &Environment {
        self.env
    }

    pub fn lctx(&self) -> &LocalContext {
        &self.lctx
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    pub(crate) fn tick(&mut self) -> KResult<()> {
        if self.fuel == 0 {
            return Err(KernelError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub(crate) fn render(&self, e: &Expr) -> String {
        pretty::print_expr(self.env, &self.lctx, e)
    }

    /// Opens a binder: pushes a fresh local and returns the instantiated body.
    pub(crate) fn open_binder(&mut self, b: &Binder, body: &Expr) -> (FVarId, Expr) {
        let x = self
            .lctx
            .push_decl(b.name.clone(), b.ty.clone(), None, b.info);
        (x, instantiate(body, &fvar(x)))
    }

    pub fn infer(&mut self, e: &Expr) -> KResult<Expr> {
        match &**e {
            Term::BVar(_) => Err(KernelError::LooseBVar),
            Term::FVar(id) => self
                .lctx
                .get(*id)
                .map(|d| d.ty.clone())
                .ok_or(KernelError::UnknownFVar),
            Term::MVar(id) => self
                .metas
                .and_then(|m| m.mvar_type(*id))
                .ok_or(KernelError::UnexpectedMVar),
            Term::Sort(l) => Ok(sort(l.succ())),
            Term::Const(n) => self
                .env
                .get(n)
                .map(|d| d.ty.clone())
                .ok_or_else(|| KernelError::UnknownConstant(n.clone())),
            Term::App(..) => self.infer_app(e),
            Term::Lam(..) => self.infer_lambda(e),
            Term::Pi(..) => {
                let l = self.infer_pi_level(e)?;
                Ok(sort(l))
            }
            Term::Let(b, v, body) => {
                self.ensure_sort(&b.ty)?;
                let vt = self.infer(v)?;
                self.expect_defeq(&b.ty, &vt, None)?;
                self.infer(&instantiate(body, v))
            }
            Term::NatLit(_) => self.literal_type("Nat"),
            Term::RatLit(_) => self.literal_type("Rat"),
            Term::Cert(p) => {
                let pt = self.infer(p)?;
                let s = self.whnf(&pt)?;
                if !matches!(&*s, Term::Sort(l) if l.is_prop()) {
                    return Err(KernelError::InvalidCertificate(format!(
                        "'{}' is not a proposition",
                        self.render(p)
                    )));
                }
                match arith::decide(p) {
                    Ok(true) => Ok(p.clone()),
                    Ok(false) => Err(KernelError::InvalidCertificate(format!(
                        "'{}' evaluates to false",
                        self.render(p)
                    ))),
                    Err(err) => Err(KernelError::InvalidCertificate(err.to_string())),
                }
            }
        }
    }

    fn literal_type(&self, name: &str) -> KResult<Expr> {
        let n = Name::new(name);
        if self.env.contains(&n) {
            Ok(cnst(n))
        } else {
            Err(KernelError::UnknownConstant(n))
        }
    }

    fn infer_app(&mut self, e: &Expr) -> KResult<Expr> {
        let (f, args) = get_app_fn_args(e);
        let mut fty = self.infer(&f)?;
        let mut applied = f.clone();
        for a in &args {
            let whnf_ty = match &*fty {
                Term::Pi(..) => fty.clone(),
                _ => self.whnf(&fty)?,
            };
            let Term::Pi(b, body) = &*whnf_ty else {
                return Err(KernelError::NotAFunction {
                    term: self.render(&applied),
                    ty: self.render(&fty),
                });
            };
            let at = self.infer(a)?;
            if !self.is_def_eq(&b.ty, &at)? {
                return Err(KernelError::TypeMismatch {
                    expected: self.render(&b.ty),
                    actual: self.render(&at),
                    location: Some(format!("argument '{}'", self.render(a))),
                });
            }
            fty = instantiate(body, a);
            applied = app(applied, a.clone());
        }
        Ok(fty)
    }

    fn infer_lambda(&mut self, e: &Expr) -> KResult<Expr> {
        let start = self.lctx.len();
        let mut cur = e.clone();
        let mut fvars = Vec::new();
        while let Term::Lam(b, body) = &*cur {
            let ty = instantiate_rev(&b.ty, &fvars.iter().map(|x| fvar(*x)).collect::<Vec<_>>());
            self.ensure_sort(&ty)?;
            let x = self.lctx.push_decl(b.name.clone(), ty, None, b.info);
            fvars.push(x);
            cur = body.clone();
        }
        let body = instantiate_rev(&cur, &fvars.iter().map(|x| fvar(*x)).collect::<Vec<_>>());
        let result = self.infer(&body).map(|bt| {
            let decls = self.lctx.decls()[start..].to_vec();
            mk_pi(&decls, &bt)
        });
        self.lctx.truncate(start);
        result
    }

    fn infer_pi_level(&mut self, e: &Expr) -> KResult<Level> {
        let start = self.lctx.len();
        let mut cur = e.clone();
        let mut levels = Vec::new();
        let mut fvars: Vec<Expr> = Vec::new();
        let result = (|| {
            while let Term::Pi(b, body) = &*cur {
                let ty = instantiate_rev(&b.ty, &fvars);
                levels.push(self.ensure_sort(&ty)?);
                let x = self.lctx.push_decl(b.name.clone(), ty, None, b.info);
                fvars.push(fvar(x));
                cur = body.clone();
            }
            let body = instantiate_rev(&cur, &fvars);
            let mut l = self.ensure_sort(&body)?;
            for dom in levels.iter().rev() {
                l = dom.imax(l);
            }
            Ok(l)
        })();
        self.lctx.truncate(start);
        result
    }

    /// Infers the type of `t`, which must be a sort, and returns its level.
    pub fn ensure_sort(&mut self, t: &Expr) -> KResult<Level> {
        let ty = self.infer(t)?;
        let ty = match &*ty {
            Term::Sort(_) => ty,
            _ => self.whnf(&ty)?,
        };
        match &*ty {
            Term::Sort(l) => Ok(*l),
            _ => Err(KernelError::NotAType {
                term: self.render(t),
                ty: self.render(&ty),
            }),
        }
    }

    pub fn check(&mut self, e: &Expr, expected: &Expr) -> KResult<()> {
        let ty = self.infer(e)?;
        self.expect_defeq(expected, &ty, None)
    }

    fn expect_defeq(&mut self, expected: &Expr, actual: &Expr, loc: Option<String>) -> KResult<()> {
        if self.is_def_eq(expected, actual)? {
            Ok(())
        } else {
            Err(KernelError::TypeMismatch {
                expected: self.render(expected),
                actual: self.render(actual),
                location: loc,
            })
        }
    }

    /// Is `e` a proof, i.e. does its type live in `Prop`?
    pub fn is_proof(&mut self, e: &Expr) -> KResult<Option<Expr>> {
        let ty = match self.infer(e) {
            Ok(t) => t,
            Err(KernelError::FuelExhausted) => return Err(KernelError::FuelExhausted),
            Err(_) => return Ok(None),
        };
        let s = match self.infer(&ty) {
            Ok(s) => s,
            Err(KernelError::FuelExhausted) => return Err(KernelError::FuelExhausted),
            Err(_) => return Ok(None),
        };
        let s = self.whnf(&s)?;
        Ok(matches!(&*s, Term::Sort(l) if l.is_prop()).then_some(ty))
    }
}

/// A declaration submitted for admission.
#[derive(Clone, Debug)]
pub enum Decl {
    Axiom { name: Name, ty: Expr },
    Definition { name: Name, ty: Expr, value: Expr },
    Theorem { name: Name, ty: Expr, value: Expr },
    Inductive(InductiveSpec),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Axiom { name, .. } | Decl::Definition { name, .. } | Decl::Theorem { name, .. } => name,
            Decl::Inductive(spec) => &spec.name,
        }
    }
}

/// Names of the axioms that close goals without proof.
pub const SORRY_AXIOMS: [&str; 2] = ["sorryAx", "sorryAxType"];

pub fn uses_sorry(e: &Expr) -> bool {
    find(e, &mut |t| {
        matches!(&**t, Term::Const(c) if SORRY_AXIOMS.contains(&c.as_str()))
    })
}

/// Type-checks `decl` against `env` and returns the extended environment.
pub fn check_decl(env: &Environment, decl: Decl) -> KResult<Environment> {
    check_decl_with_fuel(env, decl, DEFAULT_FUEL)
}

pub fn check_decl_with_fuel(env: &Environment, decl: Decl, fuel: u64) -> KResult<Environment> {
    if env.contains(decl.name()) {
        return Err(KernelError::DuplicateName(decl.name().clone()));
    }
    match decl {
        Decl::Axiom { name, ty } => {
            check_closed_type(env, &ty, fuel)?;
            let mut env = env.clone();
            env.insert(Declaration {
                name,
                ty,
                value: None,
                kind: DeclKind::Axiom,
                incomplete: false,
            });
            Ok(env)
        }
        Decl::Definition { name, ty, value } => {
            admit_valued(env, name, ty, value, DeclKind::Definition, fuel)
        }
        Decl::Theorem { name, ty, value } => admit_valued(env, name, ty, value, DeclKind::Theorem, fuel),
        Decl::Inductive(spec) => inductive::add_inductive(env, spec, fuel),
    }
}

fn check_closed_type(env: &Environment, ty: &Expr, fuel: u64) -> KResult<Level> {
    if has_loose_bvars(ty) || find(ty, &mut |t| matches!(&**t, Term::FVar(_))) {
        return Err(KernelError::NotClosed);
    }
    if has_mvars(ty) {
        return Err(KernelError::UnexpectedMVar);
    }
    TypeChecker::new(env).with_fuel(fuel).ensure_sort(ty)
}

fn admit_valued(
    env: &Environment,
    name: Name,
    ty: Expr,
    value: Expr,
    kind: DeclKind,
    fuel: u64,
) -> KResult<Environment> {
    check_closed_type(env, &ty, fuel)?;
    if has_loose_bvars(&value) || find(&value, &mut |t| matches!(&**t, Term::FVar(_))) {
        return Err(KernelError::NotClosed);
    }
    if has_mvars(&value) {
        return Err(KernelError::UnexpectedMVar);
    }
    let mut tc = TypeChecker::new(env).with_fuel(fuel);
    let vt = tc.infer(&value)?;
    if !tc.is_def_eq(&ty, &vt)? {
        return Err(KernelError::TypeMismatch {
            expected: tc.render(&ty),
            actual: tc.render(&vt),
            location: Some(format!("value of '{name}'")),
        });
    }
    let incomplete = uses_sorry(&value)
        || find(&value, &mut |t| match &**t {
            Term::Const(c) => env.get(c).is_some_and(|d| d.incomplete),
            _ => false,
        });
    let mut env = env.clone();
    env.insert(Declaration {
        name,
        ty,
        value: Some(value),
        kind,
        incomplete,
    });
    Ok(env)
}
