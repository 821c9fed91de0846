use std::collections::HashMap;

use crate::kernel::MetaView;
use crate::syntax::Span;
use crate::term::*;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MetaKind {
    /// Solved by unification: placeholders and implicit arguments.
    Natural,
    /// A proof obligation: only tactics assign it.
    Goal,
}

#[derive(Clone, Debug)]
pub struct MetaDecl {
    pub ty: Expr,
    pub lctx: LocalContext,
    pub assignment: Option<Expr>,
    pub span: Option<Span>,
    pub kind: MetaKind,
    pub user_name: Option<String>,
}

/// `?m := fun decls => ?child`, computed once `?child` is fully solved.
#[derive(Clone, Debug)]
struct Delayed {
    decls: Vec<LocalDecl>,
    child: MVarId,
}

#[derive(Clone, Debug, Default)]
pub struct MetaContext {
    decls: Vec<MetaDecl>,
    delayed: HashMap<MVarId, Delayed>,
}

impl MetaContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_mvar(&mut self, ty: Expr, lctx: LocalContext, span: Option<Span>, kind: MetaKind) -> MVarId {
        let id = MVarId(self.decls.len() as u64);
        self.decls.push(MetaDecl {
            ty,
            lctx,
            assignment: None,
            span,
            kind,
            user_name: None,
        });
        id
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn decl(&self, id: MVarId) -> &MetaDecl {
        &self.decls[id.0 as usize]
    }

    pub fn decl_mut(&mut self, id: MVarId) -> &mut MetaDecl {
        &mut self.decls[id.0 as usize]
    }

    pub fn ids(&self) -> impl Iterator<Item = MVarId> {
        (0..self.decls.len() as u64).map(MVarId)
    }

    pub fn assign(&mut self, id: MVarId, v: Expr) {
        self.decls[id.0 as usize].assignment = Some(v);
    }

    pub fn unassign(&mut self, id: MVarId) {
        self.decls[id.0 as usize].assignment = None;
    }

    pub fn delay(&mut self, id: MVarId, decls: Vec<LocalDecl>, child: MVarId) {
        self.delayed.insert(id, Delayed { decls, child });
    }

    pub fn is_assigned(&self, id: MVarId) -> bool {
        self.decl(id).assignment.is_some() || self.delayed.contains_key(&id)
    }

    /// Replaces every solved metavariable, recursively.
    pub fn instantiate(&self, e: &Expr) -> Expr {
        if !has_mvars(e) {
            return e.clone();
        }
        replace(e, &mut |t, _| match &**t {
            Term::MVar(id) => self.resolve(*id).map(|v| self.instantiate(&v)),
            _ => None,
        })
    }

    fn resolve(&self, id: MVarId) -> Option<Expr> {
        if let Some(v) = &self.decl(id).assignment {
            return Some(v.clone());
        }
        let d = self.delayed.get(&id)?;
        let body = self.instantiate(&mvar(d.child));
        if has_mvars(&body) {
            return None;
        }
        Some(mk_lambda(&d.decls, &body))
    }

    /// Metavariables in `e` that remain unsolved after instantiation.
    pub fn unassigned_in(&self, e: &Expr) -> Vec<MVarId> {
        let e = self.instantiate(e);
        let mut out = Vec::new();
        find(&e, &mut |t| {
            if let Term::MVar(id) = &**t {
                if !out.contains(id) {
                    out.push(*id);
                }
            }
            false
        });
        out
    }
}

impl MetaView for MetaContext {
    fn mvar_type(&self, id: MVarId) -> Option<Expr> {
        self.decls.get(id.0 as usize).map(|d| d.ty.clone())
    }

    fn mvar_assignment(&self, id: MVarId) -> Option<Expr> {
        self.decls.get(id.0 as usize)?;
        self.resolve(id)
    }
}
