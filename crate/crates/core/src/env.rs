//! Declarations and the environment that holds them.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::term::{Expr, Level, Name};

#[derive(Clone, Debug)]
pub struct InductiveInfo {
    pub num_params: usize,
    pub num_indices: usize,
    pub ctors: Vec<Name>,
    pub sort: Level,
}

#[derive(Clone, Debug)]
pub struct CtorInfo {
    pub inductive: Name,
    pub index: usize,
    pub num_params: usize,
    pub num_fields: usize,
}

/// Computation rule for one constructor: `rhs` is
/// `fun params motive minors fields => minor fields ihs`.
#[derive(Clone, Debug)]
pub struct RecRule {
    pub ctor: Name,
    pub num_fields: usize,
    pub rhs: Expr,
}

#[derive(Clone, Debug)]
pub struct RecursorInfo {
    pub inductive: Name,
    pub num_params: usize,
    pub num_minors: usize,
    pub num_indices: usize,
    pub elim: Level,
    pub rules: Vec<RecRule>,
}

impl RecursorInfo {
    /// Position of the major premise among the recursor's arguments.
    pub fn major_index(&self) -> usize {
        self.num_params + 1 + self.num_minors + self.num_indices
    }
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    Axiom,
    Definition,
    Theorem,
    Inductive(InductiveInfo),
    Constructor(CtorInfo),
    Recursor(RecursorInfo),
}

#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: Name,
    pub ty: Expr,
    pub value: Option<Expr>,
    pub kind: DeclKind,
    /// Set on theorems whose proof used `sorry`.
    pub incomplete: bool,
}

impl Declaration {
    pub fn is_unfoldable(&self) -> bool {
        matches!(self.kind, DeclKind::Definition) && !self.incomplete
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            DeclKind::Axiom => "axiom",
            DeclKind::Definition => "def",
            DeclKind::Theorem => "theorem",
            DeclKind::Inductive(_) => "inductive",
            DeclKind::Constructor(_) => "constructor",
            DeclKind::Recursor(_) => "recursor",
        }
    }
}

/// Insertion-ordered, append-only map of admitted declarations.
///
/// Cloning is cheap; extending a shared environment copies the index once.
/// Only the kernel adds declarations (see [`crate::kernel::check_decl`]).
#[derive(Clone, Debug, Default)]
pub struct Environment {
    decls: Arc<IndexMap<Name, Arc<Declaration>>>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &Name) -> Option<&Declaration> {
        self.decls.get(name).map(|d| &**d)
    }

    pub fn get_str(&self, name: &str) -> Option<&Declaration> {
        self.get(&Name::new(name))
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.decls.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Declaration> {
        self.decls.values().map(|d| &**d)
    }

    pub(crate) fn insert(&mut self, decl: Declaration) {
        debug_assert!(!self.decls.contains_key(&decl.name));
        Arc::make_mut(&mut self.decls).insert(decl.name.clone(), Arc::new(decl));
    }

    pub fn recursor(&self, name: &Name) -> Option<&RecursorInfo> {
        match &self.get(name)?.kind {
            DeclKind::Recursor(r) => Some(r),
            _ => None,
        }
    }

    pub fn ctor(&self, name: &Name) -> Option<&CtorInfo> {
        match &self.get(name)?.kind {
            DeclKind::Constructor(c) => Some(c),
            _ => None,
        }
    }

    pub fn inductive(&self, name: &Name) -> Option<&InductiveInfo> {
        match &self.get(name)?.kind {
            DeclKind::Inductive(i) => Some(i),
            _ => None,
        }
    }
}
