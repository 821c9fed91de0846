//! Command-line front end: `check`, `corpus`, `eval` and `serve`.
//!
//! Exit codes: 0 everything as expected, 1 proof or parse failures,
//! 2 usage errors (bad arguments, unreadable inputs), 3 success that relied
//! on `sorry` when `--strict-sorry` is given.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use microprover::driver::{self, CheckOptions, Status};
use microprover::kernel::DEFAULT_FUEL;
use microprover::prelude::load_prelude;
use microprover::server::Server;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SORRY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "microprover", version, about = "A small interactive theorem prover")]
pub struct Cli {
    /// Machine-readable JSON reports on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 3 when a check succeeds only by using `sorry`.
    #[arg(long, global = true)]
    pub strict_sorry: bool,
    /// Reduction budget per declaration.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check source files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check every entry of a corpus manifest against its expected status.
    Corpus { manifest: PathBuf },
    /// Evaluate `#check <term>`; reads stdin when the argument is omitted or `-`.
    Eval { command: Option<String> },
    /// Serve interactive proof sessions (stdio, or loopback TCP with --port).
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

/// Runs the CLI with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let opts = CheckOptions {
        fuel: cli.fuel,
        ..CheckOptions::default()
    };
    match &cli.command {
        Command::Check { files } => check(&cli, files, opts, out, err),
        Command::Corpus { manifest } => corpus(&cli, manifest, opts, out, err),
        Command::Eval { command } => eval(&cli, command.as_deref(), out, err),
        Command::Serve { port } => serve(*port, err),
    }
}

fn check(cli: &Cli, files: &[PathBuf], opts: CheckOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut reports = Vec::new();
    let mut unreadable = false;
    for f in files {
        let path = f.display().to_string();
        let src = match std::fs::read_to_string(f) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "{path}: error[IoError]: {e}");
                unreadable = true;
                continue;
            }
        };
        let report = driver::check_source(&path, &src, opts).report;
        if !cli.json {
            for d in &report.diagnostics {
                let _ = writeln!(err, "{}", driver::render_diagnostic(&path, &src, d));
            }
            let _ = writeln!(out, "{path}: {:?} ({:.1} ms)", report.status, report.elapsed);
        }
        reports.push(report);
    }
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("reports"));
    }
    if unreadable {
        EXIT_USAGE
    } else if reports.iter().any(|r| r.status == Status::Failed) {
        EXIT_FAILED
    } else if cli.strict_sorry && reports.iter().any(|r| r.status == Status::SorryWarned) {
        EXIT_SORRY
    } else {
        EXIT_OK
    }
}

fn corpus(cli: &Cli, manifest: &std::path::Path, opts: CheckOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let summary = match driver::run_corpus(manifest, opts) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("summary"));
    } else {
        for e in &summary.entries {
            if let Ok(src) = std::fs::read_to_string(&e.report.path) {
                for d in &e.report.diagnostics {
                    let _ = writeln!(err, "{}", driver::render_diagnostic(&e.report.path, &src, d));
                }
            }
            let mark = if e.matches { "ok" } else { "MISMATCH" };
            let _ = writeln!(
                out,
                "{mark:8} {} {:?} (expected {}) {:.1} ms",
                e.id, e.report.status, e.expected, e.report.elapsed
            );
        }
        let _ = writeln!(
            out,
            "{} entries: {} proved, {} sorry, {} failed, {} mismatches",
            summary.entries.len(),
            summary.all_proved,
            summary.sorry_warned,
            summary.failed,
            summary.mismatches
        );
    }
    if !summary.all_as_expected() {
        EXIT_FAILED
    } else if cli.strict_sorry && summary.sorry_warned > 0 {
        EXIT_SORRY
    } else {
        EXIT_OK
    }
}

fn eval(cli: &Cli, command: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let src = match command {
        Some(c) if c != "-" => c.to_string(),
        _ => {
            let mut s = String::new();
            if let Err(e) = std::io::Read::read_to_string(&mut std::io::stdin(), &mut s) {
                let _ = writeln!(err, "error: cannot read stdin: {e}");
                return EXIT_USAGE;
            }
            s
        }
    };
    let result = driver::check_cmd(&src, &load_prelude());
    if cli.json {
        let v = match &result {
            Ok(s) => serde_json::json!({"result": s}),
            Err(m) => serde_json::json!({"error": m}),
        };
        let _ = writeln!(out, "{v}");
    }
    match result {
        Ok(s) => {
            if !cli.json {
                let _ = writeln!(out, "{s}");
            }
            EXIT_OK
        }
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILED
        }
    }
}

fn serve(port: Option<u16>, err: &mut dyn Write) -> i32 {
    let server = Arc::new(Server::new());
    let res = match port {
        Some(p) => server.serve_tcp(p),
        None => server.serve(std::io::stdin().lock(), std::io::stdout().lock()),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
