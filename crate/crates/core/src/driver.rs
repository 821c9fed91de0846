//! File checking: tokenize, parse, elaborate and run tactics per command,
//! and admit the results through the kernel.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::corpus::{CorpusEntry, ExpectedStatus};
use crate::elab::command::{check_text, elab_command, CommandOptions, Diagnostic, Severity, EXAMPLE_NAME};
use crate::elab::ElabOptions;
use crate::env::Environment;
use crate::kernel::{check_decl_with_fuel, Decl, KResult, DEFAULT_FUEL};
use crate::prelude::load_prelude;
use crate::syntax::parser::{parse_file, parse_term};
use crate::syntax::{Span, SyntaxErrorKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    AllProved,
    SorryWarned,
    Failed,
}

impl Status {
    pub fn matches(self, expected: ExpectedStatus) -> bool {
        matches!(
            (self, expected),
            (Status::AllProved, ExpectedStatus::Proved) | (Status::SorryWarned, ExpectedStatus::SorryWarned)
        )
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub path: String,
    pub status: Status,
    pub diagnostics: Vec<Diagnostic>,
    /// Wall-clock milliseconds.
    pub elapsed: f64,
}

#[derive(Copy, Clone, Debug)]
pub struct CheckOptions {
    pub fuel: u64,
    /// Accept sorry-tainted theorems as justifications.
    pub allow_incomplete: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            fuel: DEFAULT_FUEL,
            allow_incomplete: false,
        }
    }
}

impl CheckOptions {
    fn command(self) -> CommandOptions {
        CommandOptions {
            fuel: self.fuel,
            elab: ElabOptions {
                allow_incomplete: self.allow_incomplete,
            },
        }
    }
}

/// Everything produced by checking one source text.
pub struct FileResult {
    pub report: CheckReport,
    pub env: Environment,
    /// Declarations the kernel accepted, in order (examples included).
    pub checked: Vec<Decl>,
}

pub(crate) fn syntax_code(k: SyntaxErrorKind) -> &'static str {
    match k {
        SyntaxErrorKind::LexError => "LexError",
        SyntaxErrorKind::ParseError => "ParseError",
        SyntaxErrorKind::UnsupportedTactic => "UnsupportedTactic",
    }
}

pub fn status_of(diags: &[Diagnostic]) -> Status {
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Status::Failed
    } else if diags.iter().any(|d| d.severity == Severity::Warning) {
        Status::SorryWarned
    } else {
        Status::AllProved
    }
}

/// Checks `src` on top of `base`; `path` only labels the report.
pub fn check_source_in(base: &Environment, path: &str, src: &str, opts: CheckOptions) -> FileResult {
    let start = Instant::now();
    let (cmds, errs) = parse_file(src);
    let mut diags: Vec<Diagnostic> = errs
        .into_iter()
        .map(|e| Diagnostic::error(e.span, syntax_code(e.kind), e.message))
        .collect();
    let mut env = base.clone();
    let mut checked = Vec::new();
    for c in &cmds {
        let out = elab_command(&env, c, opts.command());
        env = out.env;
        diags.extend(out.diagnostics);
        checked.extend(out.checked);
    }
    diags.sort_by_key(|d| d.span.start);
    FileResult {
        report: CheckReport {
            path: path.to_string(),
            status: status_of(&diags),
            diagnostics: diags,
            elapsed: start.elapsed().as_secs_f64() * 1000.0,
        },
        env,
        checked,
    }
}

pub fn check_source(path: &str, src: &str, opts: CheckOptions) -> FileResult {
    check_source_in(&load_prelude(), path, src, opts)
}

pub fn check_file(path: &Path, opts: CheckOptions) -> std::io::Result<CheckReport> {
    let src = std::fs::read_to_string(path)?;
    Ok(check_source(&path.display().to_string(), &src, opts).report)
}

/// Replays accepted declarations through a fresh kernel pass over a freshly
/// built prelude.
pub fn recheck(checked: &[Decl], fuel: u64) -> KResult<()> {
    let mut env = crate::prelude::build(crate::prelude::PRELUDE_SOURCE).expect("prelude");
    for d in checked {
        let next = check_decl_with_fuel(&env, d.clone(), fuel)?;
        if d.name().as_str() != EXAMPLE_NAME {
            env = next;
        }
    }
    Ok(())
}

/// `#check` on its own: accepts `#check t` or a bare term.
pub fn check_cmd(src: &str, env: &Environment) -> Result<String, String> {
    let body = src.trim().strip_prefix("#check").unwrap_or(src);
    let t = parse_term(body).map_err(|e| format!("parse error: {}", e.message))?;
    check_text(env, &t, ElabOptions::default()).map_err(|e| e.message)
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let mut offset = offset.min(src.len());
    while !src.is_char_boundary(offset) {
        offset -= 1;
    }
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// `path:line:col: severity[code]: message`.
pub fn render_diagnostic(path: &str, src: &str, d: &Diagnostic) -> String {
    let (l, c) = line_col(src, d.span.start);
    let sev = match d.severity {
        Severity::Error => "error",
        Severity::Warning => "warning",
        Severity::Info => "info",
    };
    match &d.code {
        Some(code) => format!("{path}:{l}:{c}: {sev}[{code}]: {}", d.message),
        None => format!("{path}:{l}:{c}: {sev}: {}", d.message),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryResult {
    pub id: String,
    pub expected: ExpectedStatus,
    pub matches: bool,
    pub report: CheckReport,
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusSummary {
    pub entries: Vec<EntryResult>,
    pub all_proved: usize,
    pub sorry_warned: usize,
    pub failed: usize,
    pub mismatches: usize,
}

impl CorpusSummary {
    pub fn all_as_expected(&self) -> bool {
        self.mismatches == 0
    }
}

fn run_entry(prelude: &Environment, e: &CorpusEntry, opts: CheckOptions) -> EntryResult {
    let path = e.source_path.display().to_string();
    let report = match std::fs::read_to_string(&e.source_path) {
        Ok(src) => check_source_in(prelude, &path, &src, opts).report,
        Err(err) => CheckReport {
            path,
            status: Status::Failed,
            diagnostics: vec![Diagnostic::error(Span::default(), "IoError", err.to_string())],
            elapsed: 0.0,
        },
    };
    EntryResult {
        id: e.id.clone(),
        expected: e.expected_status,
        matches: report.status.matches(e.expected_status),
        report,
    }
}

fn summarize(entries: Vec<EntryResult>) -> CorpusSummary {
    let count = |s: Status| entries.iter().filter(|r| r.report.status == s).count();
    CorpusSummary {
        all_proved: count(Status::AllProved),
        sorry_warned: count(Status::SorryWarned),
        failed: count(Status::Failed),
        mismatches: entries.iter().filter(|r| !r.matches).count(),
        entries,
    }
}

pub fn run_entries_sequential(entries: &[CorpusEntry], opts: CheckOptions) -> CorpusSummary {
    let prelude = load_prelude();
    summarize(entries.iter().map(|e| run_entry(&prelude, e, opts)).collect())
}

/// Checks entries concurrently; results keep manifest order.
#[cfg(feature = "parallel")]
pub fn run_entries_parallel(entries: &[CorpusEntry], opts: CheckOptions) -> CorpusSummary {
    use rayon::prelude::*;
    let prelude = load_prelude();
    summarize(entries.par_iter().map(|e| run_entry(&prelude, e, opts)).collect())
}

pub fn run_entries(entries: &[CorpusEntry], opts: CheckOptions) -> CorpusSummary {
    #[cfg(feature = "parallel")]
    {
        run_entries_parallel(entries, opts)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_entries_sequential(entries, opts)
    }
}

pub fn run_corpus(manifest: &Path, opts: CheckOptions) -> Result<CorpusSummary, crate::corpus::CorpusError> {
    let entries = crate::corpus::load_corpus(manifest)?;
    Ok(run_entries(&entries, opts))
}
