use std::path::PathBuf;

use microprover_cli::{run, EXIT_FAILED, EXIT_OK, EXIT_SORRY, EXIT_USAGE};
use serde_json::Value;

fn corpus(f: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(f)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("microprover").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, src: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("microprover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p
}

#[test]
fn check_reports_status_line() {
    let f = corpus("mul_comm_rewrites.mthm");
    let (code, out, err) = cli(&["check", &f]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with(&format!("{f}: AllProved (")), "{out}");
    assert!(err.is_empty());
}

#[test]
fn check_failure_renders_located_diagnostic() {
    let p = scratch("bad.mthm", "theorem t (a b : ℝ) : a * b = b * b := by\n  rw [mul_comm a b]\n");
    let (code, out, err) = cli(&["check", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains(": Failed ("));
    assert!(err.contains(":1:") || err.contains(":2:"), "{err}");
    assert!(err.contains("error["), "{err}");
}

#[test]
fn check_json_is_an_array_of_reports() {
    let (code, out, _) = cli(&["--json", "check", &corpus("sylow_exists_subgroup.mthm")]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v.as_array().unwrap()[0];
    assert_eq!(r["status"], "SorryWarned");
    assert_eq!(r["diagnostics"][0]["severity"], "warning");
    assert!(r["elapsed"].is_number());
}

#[test]
fn strict_sorry_changes_exit_code_only() {
    let f = corpus("imo2024_p2_condition.mthm");
    let (lenient, out1, _) = cli(&["check", &f]);
    let (strict, out2, _) = cli(&["--strict-sorry", "check", &f]);
    assert_eq!((lenient, strict), (EXIT_OK, EXIT_SORRY));
    assert_eq!(out1.split(" (").next(), out2.split(" (").next());
}

#[test]
fn failure_outranks_sorry_and_unreadable_outranks_failure() {
    let bad = scratch("f.mthm", "theorem t : False := by rfl\n");
    let sorry = corpus("sylow_exists_subgroup.mthm");
    let (c1, _, _) = cli(&["--strict-sorry", "check", &sorry, bad.to_str().unwrap()]);
    assert_eq!(c1, EXIT_FAILED);
    let (c2, _, err) = cli(&["check", bad.to_str().unwrap(), "/nonexistent/x.mthm"]);
    assert_eq!(c2, EXIT_USAGE);
    assert!(err.contains("IoError"));
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&[]).0, EXIT_USAGE);
    assert_eq!(cli(&["check"]).0, EXIT_USAGE);
    assert_eq!(cli(&["prove"]).0, EXIT_USAGE);
    assert_eq!(cli(&["--fuel", "lots", "check", "x"]).0, EXIT_USAGE);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("corpus"));
}

#[test]
fn corpus_summary() {
    let (code, out, _) = cli(&["corpus", &corpus("manifest.tsv")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().filter(|l| l.starts_with("ok")).count(), 5);
    assert!(out.ends_with("5 entries: 2 proved, 3 sorry, 0 failed, 0 mismatches\n"), "{out}");
    assert_eq!(cli(&["--strict-sorry", "corpus", &corpus("manifest.tsv")]).0, EXIT_SORRY);
}

#[test]
fn corpus_mismatch_and_bad_manifest() {
    let src = scratch("p.mthm", "theorem t : True := by sorry\n");
    let m = scratch("m.tsv", &format!("t\t{}\tFullProof\tProved\n", src.file_name().unwrap().to_str().unwrap()));
    let (code, out, _) = cli(&["corpus", m.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.starts_with("MISMATCH"));
    let broken = scratch("broken.tsv", "only\ttwo\n");
    assert_eq!(cli(&["corpus", broken.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn corpus_json_summary() {
    let (_, out, _) = cli(&["--json", "corpus", &corpus("manifest.tsv")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 5);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["allProved"], 2);
}

#[test]
fn eval_prints_term_and_type() {
    let (code, out, _) = cli(&["eval", "#check mul_comm"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "mul_comm : ∀ (a b : ℝ), a * b = b * a\n");
    let (code, out, _) = cli(&["--json", "eval", "(2 : ℚ) / 3"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["result"].as_str().unwrap().ends_with(": ℚ"));
    let (code, _, err) = cli(&["eval", "#check (1 : ℝ) + True"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.starts_with("error: "));
}

#[test]
fn output_is_deterministic() {
    let f = corpus("mathd_algebra_270.mthm");
    let strip = |s: String| -> String {
        let mut v: Value = serde_json::from_str(&s).unwrap();
        v[0]["elapsed"] = Value::from(0);
        v.to_string()
    };
    let a = strip(cli(&["--json", "check", &f]).1);
    let b = strip(cli(&["--json", "check", &f]).1);
    assert_eq!(a, b);
}

#[test]
fn tiny_fuel_fails_instead_of_hanging() {
    let p = scratch(
        "fuel.mthm",
        "def dbl (n : ℕ) : ℕ := n + n\ntheorem t : dbl (dbl (dbl (dbl 1))) = 16 := rfl\n",
    );
    let (code, _, err) = cli(&["--fuel", "10", "check", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("FuelExhausted"));
    assert_eq!(cli(&["check", p.to_str().unwrap()]).0, EXIT_OK);
}
