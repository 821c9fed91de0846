//! Inductive types: admission checks, constructors and recursors.

use super::{check_closed_type, KResult, KernelError, TypeChecker};
use crate::env::{CtorInfo, DeclKind, Declaration, Environment, InductiveInfo, RecRule, RecursorInfo};
use crate::term::*;

/// An inductive family as submitted to the kernel: the type former's type
/// (parameters then indices, ending in a sort) and closed constructor types
/// `Π params fields, name params indices`.
#[derive(Clone, Debug)]
pub struct InductiveSpec {
    pub name: Name,
    pub ty: Expr,
    pub num_params: usize,
    pub ctors: Vec<(Name, Expr)>,
}

struct RecursiveField {
    /// Position of the field among the constructor's fields.
    field: usize,
    xs: Vec<LocalDecl>,
    indices: Vec<Expr>,
}

struct CtorShape {
    name: Name,
    fields: Vec<LocalDecl>,
    indices: Vec<Expr>,
    recursive: Vec<RecursiveField>,
}

struct Shape {
    params: Vec<LocalDecl>,
    /// Index binder types, closed over the parameters (de Bruijn form).
    index_telescope: Expr,
    num_indices: usize,
    sort: Level,
    ctors: Vec<CtorShape>,
}

fn peel_telescope(ty: &Expr) -> (Vec<Binder>, Expr) {
    let mut binders = Vec::new();
    let mut cur = ty.clone();
    while let Term::Pi(b, body) = &*cur {
        binders.push(b.clone());
        cur = body.clone();
    }
    (binders, cur)
}

/// Checks the type former and constructors of `spec` in `env`, which must
/// already contain the type former itself.
fn analyze(tc: &mut TypeChecker<'_>, spec: &InductiveSpec) -> KResult<Shape> {
    let invalid = |msg: &str| KernelError::InvalidInductive(spec.name.clone(), msg.to_string());
    let (binders, result_sort) = peel_telescope(&spec.ty);
    if binders.len() < spec.num_params {
        return Err(invalid("fewer binders than parameters"));
    }
    let Term::Sort(sort_level) = &*result_sort else {
        return Err(invalid("type former must end in a sort"));
    };
    let sort_level = *sort_level;

    let mut param_fvars = Vec::new();
    let mut params = Vec::new();
    for b in &binders[..spec.num_params] {
        let ty = instantiate_rev(&b.ty, &param_fvars);
        let x = tc.lctx.push_decl(b.name.clone(), ty, None, BinderInfo::Implicit);
        params.push(tc.lctx.get(x).cloned().expect("just pushed"));
        param_fvars.push(fvar(x));
    }
    let mut index_telescope = result_sort.clone();
    for b in binders[spec.num_params..].iter().rev() {
        index_telescope = pi(b.clone(), index_telescope);
    }
    let index_telescope = instantiate_rev(&index_telescope, &param_fvars);
    let index_telescope = abstract_fvars(&index_telescope, &params.iter().map(|d| d.fvar).collect::<Vec<_>>());
    let num_indices = binders.len() - spec.num_params;

    let base = tc.lctx.len();
    let mut ctors = Vec::new();
    for (cname, cty) in &spec.ctors {
        tc.lctx.truncate(base);
        let (cbinders, cresult) = peel_telescope(cty);
        if cbinders.len() < spec.num_params {
            return Err(invalid(&format!("constructor '{cname}' does not take the parameters")));
        }
        let mut subst = Vec::new();
        for (i, b) in cbinders[..spec.num_params].iter().enumerate() {
            let ty = instantiate_rev(&b.ty, &subst);
            if !tc.is_def_eq(&ty, &params[i].ty)? {
                return Err(invalid(&format!("constructor '{cname}' has mismatched parameter {}", i + 1)));
            }
            subst.push(param_fvars[i].clone());
        }
        let mut fields = Vec::new();
        let mut recursive = Vec::new();
        for (k, b) in cbinders[spec.num_params..].iter().enumerate() {
            let ty = instantiate_rev(&b.ty, &subst);
            let field_level = tc.ensure_sort(&ty)?;
            if !sort_level.is_prop() && field_level > sort_level {
                return Err(invalid(&format!(
                    "field {} of '{cname}' lives in a larger universe than the type",
                    k + 1
                )));
            }
            if let Some((xs, indices)) = check_positivity(tc, spec, cname, &param_fvars, &ty)? {
                recursive.push(RecursiveField { field: k, xs, indices });
            }
            let x = tc.lctx.push_decl(b.name.clone(), ty, None, BinderInfo::Default);
            fields.push(tc.lctx.get(x).cloned().expect("just pushed"));
            subst.push(fvar(x));
        }
        let result = instantiate_rev(&cresult, &subst);
        let (head, args) = get_app_fn_args(&result);
        let head_ok = matches!(&*head, Term::Const(n) if *n == spec.name);
        if !head_ok || args.len() != spec.num_params + num_indices {
            return Err(invalid(&format!("constructor '{cname}' must return '{}'", spec.name)));
        }
        for (a, p) in args.iter().zip(&param_fvars) {
            if !alpha_eq(a, p) {
                return Err(invalid(&format!(
                    "constructor '{cname}' must return '{}' applied to its parameters",
                    spec.name
                )));
            }
        }
        let indices = args[spec.num_params..].to_vec();
        if indices.iter().any(|i| has_const(i, &spec.name)) {
            return Err(KernelError::PositivityViolation {
                inductive: spec.name.clone(),
                ctor: cname.clone(),
                reason: "occurrence in result index".into(),
            });
        }
        ctors.push(CtorShape {
            name: cname.clone(),
            fields,
            indices,
            recursive,
        });
    }
    tc.lctx.truncate(base);
    Ok(Shape {
        params,
        index_telescope,
        num_indices,
        sort: sort_level,
        ctors,
    })
}

/// Returns the binders and indices of a recursive occurrence, `None` if the
/// field does not mention the inductive.
fn check_positivity(
    tc: &mut TypeChecker<'_>,
    spec: &InductiveSpec,
    ctor: &Name,
    params: &[Expr],
    ty: &Expr,
) -> KResult<Option<(Vec<LocalDecl>, Vec<Expr>)>> {
    if !has_const(ty, &spec.name) {
        return Ok(None);
    }
    let violation = |reason: &str| KernelError::PositivityViolation {
        inductive: spec.name.clone(),
        ctor: ctor.clone(),
        reason: reason.to_string(),
    };
    let start = tc.lctx.len();
    let mut cur = tc.whnf(ty)?;
    let mut xs = Vec::new();
    while let Term::Pi(b, body) = &*cur.clone() {
        if has_const(&b.ty, &spec.name) {
            tc.lctx.truncate(start);
            return Err(violation("negative occurrence"));
        }
        let x = tc.lctx.push_decl(b.name.clone(), b.ty.clone(), None, b.info);
        xs.push(tc.lctx.get(x).cloned().expect("just pushed"));
        cur = tc.whnf(&instantiate(body, &fvar(x)))?;
    }
    tc.lctx.truncate(start);
    let (head, args) = get_app_fn_args(&cur);
    let direct = matches!(&*head, Term::Const(n) if *n == spec.name)
        && args.len() >= params.len()
        && args.iter().zip(params).all(|(a, p)| alpha_eq(a, p));
    if !direct {
        return Err(violation("nested or non-uniform occurrence"));
    }
    let indices = args[params.len()..].to_vec();
    if indices.iter().any(|i| has_const(i, &spec.name)) {
        return Err(violation("occurrence inside an index"));
    }
    Ok(Some((xs, indices)))
}

pub(super) fn add_inductive(env: &Environment, spec: InductiveSpec, fuel: u64) -> KResult<Environment> {
    let rec_name = spec.name.child("rec");
    let ind_name = spec.name.child("ind");
    for n in spec
        .ctors
        .iter()
        .map(|(n, _)| n)
        .chain([&rec_name, &ind_name])
    {
        if env.contains(n) {
            return Err(KernelError::DuplicateName(n.clone()));
        }
    }
    check_closed_type(env, &spec.ty, fuel)?;
    let (binders, _) = peel_telescope(&spec.ty);
    let Term::Sort(level) = &*peel_telescope(&spec.ty).1 else {
        return Err(KernelError::InvalidInductive(
            spec.name.clone(),
            "type former must end in a sort".into(),
        ));
    };
    let mut env1 = env.clone();
    env1.insert(Declaration {
        name: spec.name.clone(),
        ty: spec.ty.clone(),
        value: None,
        kind: DeclKind::Inductive(InductiveInfo {
            num_params: spec.num_params,
            num_indices: binders.len().saturating_sub(spec.num_params),
            ctors: spec.ctors.iter().map(|(n, _)| n.clone()).collect(),
            sort: *level,
        }),
        incomplete: false,
    });
    for (_, cty) in &spec.ctors {
        if has_loose_bvars(cty) || has_mvars(cty) {
            return Err(KernelError::NotClosed);
        }
        TypeChecker::new(&env1).with_fuel(fuel).ensure_sort(cty)?;
    }
    let shape = {
        let mut tc = TypeChecker::new(&env1).with_fuel(fuel);
        analyze(&mut tc, &spec)?
    };
    let mut env2 = env1;
    for (i, ((cname, cty), c)) in spec.ctors.iter().zip(&shape.ctors).enumerate() {
        env2.insert(Declaration {
            name: cname.clone(),
            ty: cty.clone(),
            value: None,
            kind: DeclKind::Constructor(CtorInfo {
                inductive: spec.name.clone(),
                index: i,
                num_params: spec.num_params,
                num_fields: c.fields.len(),
            }),
            incomplete: false,
        });
    }
    let elims: Vec<(Name, Level)> = if shape.sort.is_prop() {
        vec![(rec_name, Level::PROP)]
    } else {
        vec![(rec_name, Level::TYPE), (ind_name, Level::PROP)]
    };
    for (name, elim) in elims {
        let decl = build_recursor(&env2, &spec, &shape, name, elim)?;
        TypeChecker::new(&env2).with_fuel(fuel).ensure_sort(&decl.ty)?;
        env2.insert(decl);
    }
    Ok(env2)
}

/// Builds the dependent eliminator of an admitted inductive with its motive
/// landing in `Sort elim`. Multi-constructor propositions (and those with
/// non-propositional data not determined by indices) only eliminate into Prop.
pub fn mk_recursor(env: &Environment, spec: &InductiveSpec, rec_name: Name, elim: Level) -> KResult<Declaration> {
    let mut tc = TypeChecker::new(env);
    let shape = analyze(&mut tc, spec)?;
    build_recursor(env, spec, &shape, rec_name, elim)
}

fn build_recursor(
    env: &Environment,
    spec: &InductiveSpec,
    shape: &Shape,
    rec_name: Name,
    elim: Level,
) -> KResult<Declaration> {
    if shape.sort.is_prop() && !elim.is_prop() {
        check_large_elimination(env, spec, shape)?;
    }
    let params = &shape.params;
    let param_exprs: Vec<Expr> = params.iter().map(|d| fvar(d.fvar)).collect();
    let ind_app = |indices: &[Expr]| mk_app(mk_app(cnst(spec.name.clone()), param_exprs.clone()), indices.iter().cloned());

    // indices and major premise
    let mut idx_decls = Vec::new();
    let mut tel = instantiate_rev(&shape.index_telescope, &param_exprs);
    for i in 0..shape.num_indices {
        let Term::Pi(b, body) = &*tel.clone() else { unreachable!("index telescope") };
        let decl = LocalDecl {
            fvar: FVarId::fresh(),
            user_name: if b.name.is_empty() { format!("i{i}") } else { b.name.clone() },
            ty: b.ty.clone(),
            value: None,
            info: BinderInfo::Implicit,
        };
        tel = instantiate(body, &fvar(decl.fvar));
        idx_decls.push(decl);
    }
    let idx_exprs: Vec<Expr> = idx_decls.iter().map(|d| fvar(d.fvar)).collect();
    let major = LocalDecl {
        fvar: FVarId::fresh(),
        user_name: "t".into(),
        ty: ind_app(&idx_exprs),
        value: None,
        info: BinderInfo::Default,
    };
    let mut motive_binders = idx_decls.clone();
    motive_binders.iter_mut().for_each(|d| d.info = BinderInfo::Default);
    motive_binders.push(major.clone());
    let motive = LocalDecl {
        fvar: FVarId::fresh(),
        user_name: "motive".into(),
        ty: mk_pi(&motive_binders, &sort(elim)),
        value: None,
        info: BinderInfo::Default,
    };
    let motive_e = fvar(motive.fvar);

    let mut minors = Vec::new();
    for c in &shape.ctors {
        let mut ihs = Vec::new();
        for r in &c.recursive {
            let f = fvar(c.fields[r.field].fvar);
            let f_app = mk_app(f, r.xs.iter().map(|d| fvar(d.fvar)));
            let body = mk_app(motive_e.clone(), r.indices.iter().cloned().chain([f_app]));
            ihs.push(LocalDecl {
                fvar: FVarId::fresh(),
                user_name: format!("{}_ih", c.fields[r.field].user_name),
                ty: mk_pi(&r.xs, &body),
                value: None,
                info: BinderInfo::Default,
            });
        }
        let ctor_app = mk_app(
            mk_app(cnst(c.name.clone()), param_exprs.clone()),
            c.fields.iter().map(|d| fvar(d.fvar)),
        );
        let concl = mk_app(motive_e.clone(), c.indices.iter().cloned().chain([ctor_app]));
        let binders: Vec<LocalDecl> = c.fields.iter().cloned().chain(ihs).collect();
        let short = c.name.as_str().rsplit('.').next().unwrap_or("minor").to_string();
        minors.push(LocalDecl {
            fvar: FVarId::fresh(),
            user_name: short,
            ty: mk_pi(&binders, &concl),
            value: None,
            info: BinderInfo::Default,
        });
    }

    let mut all: Vec<LocalDecl> = params.clone();
    all.push(motive.clone());
    all.extend(minors.iter().cloned());
    all.extend(idx_decls.iter().cloned());
    all.push(major.clone());
    let concl = mk_app(motive_e.clone(), idx_exprs.iter().cloned().chain([fvar(major.fvar)]));
    let rec_ty = mk_pi(&all, &concl);

    let prefix: Vec<LocalDecl> = params
        .iter()
        .cloned()
        .chain([motive.clone()])
        .chain(minors.iter().cloned())
        .collect();
    let prefix_exprs: Vec<Expr> = prefix.iter().map(|d| fvar(d.fvar)).collect();
    let mut rules = Vec::new();
    for (c, minor) in shape.ctors.iter().zip(&minors) {
        let mut args: Vec<Expr> = c.fields.iter().map(|d| fvar(d.fvar)).collect();
        for r in &c.recursive {
            let f_app = mk_app(fvar(c.fields[r.field].fvar), r.xs.iter().map(|d| fvar(d.fvar)));
            let rec_app = mk_app(
                cnst(rec_name.clone()),
                prefix_exprs.iter().cloned().chain(r.indices.iter().cloned()).chain([f_app]),
            );
            args.push(mk_lambda(&r.xs, &rec_app));
        }
        let body = mk_app(fvar(minor.fvar), args);
        let binders: Vec<LocalDecl> = prefix.iter().cloned().chain(c.fields.iter().cloned()).collect();
        rules.push(RecRule {
            ctor: c.name.clone(),
            num_fields: c.fields.len(),
            rhs: mk_lambda(&binders, &body),
        });
    }
    Ok(Declaration {
        name: rec_name,
        ty: rec_ty,
        value: None,
        kind: DeclKind::Recursor(RecursorInfo {
            inductive: spec.name.clone(),
            num_params: spec.num_params,
            num_minors: shape.ctors.len(),
            num_indices: shape.num_indices,
            elim,
            rules,
        }),
        incomplete: false,
    })
}

fn check_large_elimination(env: &Environment, spec: &InductiveSpec, shape: &Shape) -> KResult<()> {
    let deny = || KernelError::LargeElimination(spec.name.clone());
    match shape.ctors.as_slice() {
        [] => Ok(()),
        [c] => {
            let mut scoped = LocalContext::new();
            for d in shape.params.iter().chain(&c.fields) {
                scoped.push_existing(d.clone());
            }
            let mut tc = TypeChecker::with_context(env, scoped);
            for f in &c.fields {
                let level = tc.ensure_sort(&f.ty)?;
                let in_index = c.indices.iter().any(|i| alpha_eq(i, &fvar(f.fvar)));
                if !level.is_prop() && !in_index {
                    return Err(deny());
                }
            }
            Ok(())
        }
        _ => Err(deny()),
    }
}
