//! Elaboration of top-level commands into kernel declarations.

use serde::Serialize;

use super::*;
use crate::kernel::{check_decl_with_fuel, uses_sorry, Decl, InductiveSpec, DEFAULT_FUEL};
use crate::syntax::ast::{Command, CommandKind, CtorDecl, Proof, SBinder};
use crate::syntax::pretty::display_const;
use crate::tactic::ProofState;

/// Name under which `example` bodies are checked.
pub const EXAMPLE_NAME: &str = "_example";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    /// Machine-readable reason, e.g. `RwNoMatch`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            code: Some(code.into()),
            message: message.into(),
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            span,
            code: None,
            message: message.into(),
        }
    }

    pub fn info(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Info,
            span,
            code: None,
            message: message.into(),
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub struct CommandOptions {
    pub fuel: u64,
    pub elab: ElabOptions,
}

impl Default for CommandOptions {
    fn default() -> Self {
        CommandOptions {
            fuel: DEFAULT_FUEL,
            elab: ElabOptions::default(),
        }
    }
}

/// Result of one command: the (possibly) extended environment, its
/// diagnostics, and every declaration the kernel accepted along the way.
pub struct CommandOutput {
    pub env: Environment,
    pub diagnostics: Vec<Diagnostic>,
    pub checked: Vec<Decl>,
    pub used_sorry: bool,
}

struct Failure {
    span: Span,
    code: String,
    message: String,
}

impl From<ElabError> for Failure {
    fn from(e: ElabError) -> Self {
        Failure {
            span: e.span,
            code: elab_code(e.kind).to_string(),
            message: e.message,
        }
    }
}

fn elab_code(k: ElabErrorKind) -> &'static str {
    crate::tactic::TacticErrorKind::Elab(k).reason()
}

fn kernel_failure(span: Span, e: KernelError) -> Failure {
    let code = match &e {
        KernelError::TypeMismatch { .. } => "TypeMismatch",
        KernelError::PositivityViolation { .. } => "PositivityViolation",
        KernelError::DuplicateName(_) => "DuplicateName",
        KernelError::FuelExhausted => "FuelExhausted",
        KernelError::UnknownConstant(_) => "UnknownConstant",
        _ => "KernelError",
    };
    Failure {
        span,
        code: code.to_string(),
        message: e.to_string(),
    }
}

/// Elaborates binders into the elaborator's local context.
fn push_header(el: &mut Elaborator<'_>, binders: &[SBinder]) -> EResult<()> {
    for b in binders {
        el.push_binder(b, None)?;
    }
    Ok(())
}

/// Closes the header: resolves numerals and checks that no metavariable
/// is left in the binder types or in `extra`.
fn header_decls(el: &mut Elaborator<'_>, extra: &[(&Expr, Span)], span: Span) -> EResult<Vec<LocalDecl>> {
    el.synthesize(0, true)?;
    let decls: Vec<LocalDecl> = el
        .lctx
        .iter()
        .map(|d| {
            let mut d = d.clone();
            d.ty = el.mctx.instantiate(&d.ty);
            d
        })
        .collect();
    for d in &decls {
        el.finalize(&d.ty, span)?;
    }
    for (e, sp) in extra {
        el.finalize(e, *sp)?;
    }
    Ok(decls)
}

/// Elaborates `binders : statement` to a local context and a target.
pub fn elab_statement(
    env: &Environment,
    binders: &[SBinder],
    statement: &STerm,
    opts: ElabOptions,
) -> EResult<(LocalContext, Expr)> {
    let mut el = Elaborator::new(env, LocalContext::new(), MetaContext::new()).with_options(opts);
    push_header(&mut el, binders)?;
    let ty = el.elab_type(statement)?;
    let decls = header_decls(&mut el, &[(&ty, statement.span)], statement.span)?;
    let ty = el.finalize(&ty, statement.span)?;
    let mut lctx = LocalContext::new();
    for d in decls {
        lctx.push_existing(d);
    }
    Ok((lctx, ty))
}

pub fn elab_command(env: &Environment, cmd: &Command, opts: CommandOptions) -> CommandOutput {
    let mut out = CommandOutput {
        env: env.clone(),
        diagnostics: Vec::new(),
        checked: Vec::new(),
        used_sorry: false,
    };
    let r = match &cmd.kind {
        CommandKind::Import(m) => import(m, cmd.span),
        CommandKind::Def { name, binders, ty, body } => def(&mut out, name, binders, ty.as_ref(), body, cmd, opts),
        CommandKind::Theorem {
            name,
            binders,
            statement,
            proof,
        } => theorem(&mut out, name.as_deref(), binders, statement, proof, cmd, opts),
        CommandKind::Axiom { name, binders, ty } => axiom(&mut out, name, binders, ty, cmd, opts),
        CommandKind::Inductive {
            name,
            binders,
            ty,
            ctors,
        } => inductive(&mut out, name, binders, ty.as_ref(), ctors, cmd, opts),
        CommandKind::Check(t) => check(&mut out, t, opts),
    };
    if let Err(f) = r {
        out.diagnostics.push(Diagnostic::error(f.span, f.code, f.message));
    }
    if out.used_sorry {
        out.diagnostics
            .push(Diagnostic::warning(cmd.head_span, "declaration uses 'sorry'"));
    }
    out
}

fn import(module: &str, span: Span) -> Result<(), Failure> {
    if KNOWN_MODULES.contains(&module) {
        Ok(())
    } else {
        Err(Failure {
            span,
            code: "UnknownModule".into(),
            message: format!("unknown module '{module}'"),
        })
    }
}

fn admit(out: &mut CommandOutput, decl: Decl, span: Span, keep: bool, fuel: u64) -> Result<(), Failure> {
    let env = check_decl_with_fuel(&out.env, decl.clone(), fuel).map_err(|e| kernel_failure(span, e))?;
    out.checked.push(decl);
    if keep {
        out.env = env;
    }
    Ok(())
}

fn def(
    out: &mut CommandOutput,
    name: &str,
    binders: &[SBinder],
    ty: Option<&STerm>,
    body: &STerm,
    cmd: &Command,
    opts: CommandOptions,
) -> Result<(), Failure> {
    let env = out.env.clone();
    let mut el = Elaborator::new(&env, LocalContext::new(), MetaContext::new()).with_options(opts.elab);
    push_header(&mut el, binders)?;
    let expected = match ty {
        Some(t) => Some(el.elab_type(t)?),
        None => None,
    };
    let (v, vty) = el.elab(body, expected.as_ref())?;
    let decls = header_decls(&mut el, &[], cmd.head_span)?;
    let v = el.finalize(&v, body.span)?;
    let vty = el.finalize(expected.as_ref().unwrap_or(&vty), cmd.head_span)?;
    out.used_sorry |= el.used_sorry;
    let decl = Decl::Definition {
        name: Name::new(name),
        ty: mk_pi(&decls, &vty),
        value: mk_lambda(&decls, &v),
    };
    admit(out, decl, cmd.head_span, true, opts.fuel)
}

fn axiom(
    out: &mut CommandOutput,
    name: &str,
    binders: &[SBinder],
    ty: &STerm,
    cmd: &Command,
    opts: CommandOptions,
) -> Result<(), Failure> {
    let (lctx, t) = elab_statement(&out.env, binders, ty, opts.elab)?;
    let decls: Vec<LocalDecl> = lctx.iter().cloned().collect();
    let decl = Decl::Axiom {
        name: Name::new(name),
        ty: mk_pi(&decls, &t),
    };
    admit(out, decl, cmd.head_span, true, opts.fuel)
}

fn theorem(
    out: &mut CommandOutput,
    name: Option<&str>,
    binders: &[SBinder],
    statement: &STerm,
    proof: &Proof,
    cmd: &Command,
    opts: CommandOptions,
) -> Result<(), Failure> {
    let (lctx, target) = elab_statement(&out.env, binders, statement, opts.elab)?;
    let decls: Vec<LocalDecl> = lctx.iter().cloned().collect();
    let ty = mk_pi(&decls, &target);
    let keep = name.is_some();
    let name = Name::new(name.unwrap_or(EXAMPLE_NAME));
    match prove(&out.env, &lctx, &target, proof, cmd, opts) {
        Ok((pf, sorry)) => {
            out.used_sorry |= sorry;
            let decl = Decl::Theorem {
                name,
                ty,
                value: mk_lambda(&decls, &pf),
            };
            admit(out, decl, cmd.head_span, keep, opts.fuel)
        }
        Err(f) => {
            // keep the statement usable by later commands, tainted as incomplete
            if keep {
                let value = mk_lambda(&decls, &app(cnst("sorryAx"), target.clone()));
                if let Ok(env) = check_decl_with_fuel(&out.env, Decl::Theorem { name, ty, value }, opts.fuel) {
                    out.env = env;
                }
            }
            Err(f)
        }
    }
}

/// The proof of `lctx ⊢ target`, and whether it used `sorry`.
fn prove(
    env: &Environment,
    lctx: &LocalContext,
    target: &Expr,
    proof: &Proof,
    cmd: &Command,
    opts: CommandOptions,
) -> Result<(Expr, bool), Failure> {
    match proof {
        Proof::Term(t) => {
            let mut el = Elaborator::new(env, lctx.clone(), MetaContext::new()).with_options(opts.elab);
            let (e, _) = el.elab(t, Some(target))?;
            let e = el.finalize(&e, t.span)?;
            let sorry = el.used_sorry || uses_sorry(&e);
            Ok((e, sorry))
        }
        Proof::Tactics(tacs) => {
            let mut st = ProofState::new(env, lctx, target)
                .map_err(|e| kernel_failure(cmd.head_span, e))?
                .with_options(opts.elab);
            for t in tacs {
                st = st.run(t).map_err(|e| Failure {
                    span: e.span,
                    code: e.kind.reason().to_string(),
                    message: e.message,
                })?;
            }
            if !st.is_solved() {
                return Err(Failure {
                    span: cmd.head_span,
                    code: "UnsolvedGoals".into(),
                    message: format!("unsolved goals\n{}", st.render_goals()),
                });
            }
            let pf = st.proof().ok_or_else(|| Failure {
                span: cmd.head_span,
                code: "UnsolvedGoals".into(),
                message: "proof term contains unassigned metavariables".into(),
            })?;
            let sorry = st.used_sorry || uses_sorry(&pf);
            Ok((pf, sorry))
        }
    }
}

fn inductive(
    out: &mut CommandOutput,
    name: &str,
    binders: &[SBinder],
    ty: Option<&STerm>,
    ctors: &[CtorDecl],
    cmd: &Command,
    opts: CommandOptions,
) -> Result<(), Failure> {
    let ind = Name::new(name);
    let env = out.env.clone();
    let (params, sort) = {
        let mut el = Elaborator::new(&env, LocalContext::new(), MetaContext::new()).with_options(opts.elab);
        push_header(&mut el, binders)?;
        let sort = match ty {
            Some(t) => el.elab_type(t)?,
            None => type0(),
        };
        let params = header_decls(&mut el, &[(&sort, cmd.head_span)], cmd.head_span)?;
        (params, el.finalize(&sort, cmd.head_span)?)
    };
    let former_ty = mk_pi(&params, &sort);
    // constructors refer to the type former while it is being declared
    let scratch = check_decl_with_fuel(
        &env,
        Decl::Axiom {
            name: ind.clone(),
            ty: former_ty.clone(),
        },
        opts.fuel,
    )
    .map_err(|e| kernel_failure(cmd.head_span, e))?;
    let implicit_params: Vec<LocalDecl> = params
        .iter()
        .map(|d| LocalDecl {
            info: BinderInfo::Implicit,
            ..d.clone()
        })
        .collect();
    let mut specs = Vec::new();
    for c in ctors {
        let mut lctx = LocalContext::new();
        for d in &params {
            lctx.push_existing(d.clone());
        }
        let mut el = Elaborator::new(&scratch, lctx, MetaContext::new()).with_options(opts.elab);
        let mark = el.lctx.len();
        // naming a parameter among the binders makes it explicit here
        let mut tele = implicit_params.clone();
        let mut fields = Vec::new();
        for b in &c.binders {
            match params.iter().position(|d| d.user_name == b.name) {
                Some(i) => {
                    if let Some(t) = &b.ty {
                        let t = el.elab_type(t)?;
                        if !el.unify(&t, &params[i].ty) {
                            return Err(el.mismatch(b.span, &params[i].ty, &t, None).into());
                        }
                    }
                    tele[i].info = BinderInfo::Default;
                }
                None => fields.push(b.clone()),
            }
        }
        push_header(&mut el, &fields)?;
        let result = match &c.ty {
            Some(t) => el.elab_type(t)?,
            None => mk_app(cnst(ind.clone()), params.iter().map(|d| fvar(d.fvar))),
        };
        let all = header_decls(&mut el, &[(&result, c.span)], c.span)?;
        let result = el.finalize(&result, c.span)?;
        tele.extend(all[mark..].iter().cloned());
        specs.push((ind.child(&c.name), mk_pi(&tele, &result)));
    }
    let decl = Decl::Inductive(InductiveSpec {
        name: ind,
        ty: former_ty,
        num_params: params.len(),
        ctors: specs,
    });
    admit(out, decl, cmd.head_span, true, opts.fuel)
}

fn check(out: &mut CommandOutput, t: &STerm, opts: CommandOptions) -> Result<(), Failure> {
    let text = check_text(&out.env, t, opts.elab)?;
    out.diagnostics.push(Diagnostic::info(t.span, text));
    Ok(())
}

/// `#check` output: `name : type` for a constant, `term : type` otherwise.
pub fn check_text(env: &Environment, t: &STerm, opts: ElabOptions) -> EResult<String> {
    let lctx = LocalContext::new();
    if let STermKind::Ident(n) = &t.kind {
        let canonical = match n.as_str() {
            "ℝ" => "Real",
            "ℚ" => "Rat",
            "ℕ" => "Nat",
            other => other,
        };
        if let Some(d) = env.get_str(canonical) {
            return Ok(format!("{} : {}", display_const(&d.name), print_expr(env, &lctx, &d.ty)));
        }
    }
    let mut el = Elaborator::new(env, lctx.clone(), MetaContext::new()).with_options(opts);
    let (e, ty) = el.elab(t, None)?;
    let e = el.finalize(&e, t.span)?;
    let ty = el.finalize(&ty, t.span)?;
    Ok(format!("{} : {}", print_expr(env, &lctx, &e), print_expr(env, &lctx, &ty)))
}
