//! The built-in environment, elaborated from embedded source and admitted
//! declaration by declaration through the kernel.

use once_cell::sync::Lazy;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::elab::command::{elab_command, CommandOptions, Severity};
use crate::env::Environment;
use crate::syntax::parser::parse_file;
use crate::syntax::Span;

pub const PRELUDE_SOURCE: &str = include_str!("prelude.mthm");

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("prelude declaration at bytes {}..{} failed to check: {message}", .span.start, .span.end)]
pub struct PreludeCheckFailure {
    pub span: Span,
    pub message: String,
}

static PRELUDE: Lazy<Result<Environment, PreludeCheckFailure>> = Lazy::new(|| build(PRELUDE_SOURCE));

/// Elaborates prelude-style source into a fresh environment.
pub fn build(src: &str) -> Result<Environment, PreludeCheckFailure> {
    let (cmds, errs) = parse_file(src);
    if let Some(e) = errs.first() {
        return Err(PreludeCheckFailure {
            span: e.span,
            message: e.message.clone(),
        });
    }
    let mut env = Environment::new();
    for c in &cmds {
        let out = elab_command(&env, c, CommandOptions::default());
        if let Some(d) = out.diagnostics.iter().find(|d| d.severity == Severity::Error) {
            return Err(PreludeCheckFailure {
                span: d.span,
                message: d.message.clone(),
            });
        }
        env = out.env;
    }
    Ok(env)
}

/// The prelude environment (built once per process).
pub fn try_load_prelude() -> Result<Environment, PreludeCheckFailure> {
    PRELUDE.clone()
}

/// Like [`try_load_prelude`], but a broken prelude is a bug and panics.
pub fn load_prelude() -> Environment {
    match try_load_prelude() {
        Ok(env) => env,
        Err(e) => panic!("{e}"),
    }
}

/// SHA-256 of the prelude source, hex encoded.
pub fn prelude_digest() -> String {
    Sha256::digest(PRELUDE_SOURCE.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
