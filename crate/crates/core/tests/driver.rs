use std::path::PathBuf;

use microprover::corpus::load_corpus;
use microprover::driver::*;
use microprover::prelude::load_prelude;

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn check(src: &str) -> CheckReport {
    check_source("t.mthm", src, CheckOptions::default()).report
}

#[test]
fn rewrite_script_proves() {
    let r = check(&corpus("mul_comm_rewrites.mthm"));
    assert_eq!(r.status, Status::AllProved, "{:?}", r.diagnostics);
    assert!(r.diagnostics.is_empty());
}

#[test]
fn rewrite_script_without_second_rewrite_fails() {
    let src = corpus("mul_comm_rewrites.mthm").replace("  rw [(mul_assoc b c a)]\n", "");
    let r = check(&src);
    assert_eq!(r.status, Status::Failed);
    let d = &r.diagnostics[0];
    assert!(matches!(d.code.as_deref(), Some("RwNoMatch") | Some("UnsolvedGoals")), "{d:?}");
    let example_at = src.find("example").unwrap();
    assert!(d.span.start >= example_at && d.span.end <= src.len());
}

#[test]
fn sylow_statement_is_sorry_warned() {
    assert_eq!(check(&corpus("sylow_exists_subgroup.mthm")).status, Status::SorryWarned);
}

#[test]
fn statement_with_by_sorry() {
    let r = check("theorem t (a b : ℝ) : a * b = b * a := by sorry\n");
    assert_eq!(r.status, Status::SorryWarned);
}

#[test]
fn collects_errors_across_commands() {
    let r = check("theorem a : False := by rfl\ntheorem b : (2 : ℕ) = 3 := by norm_num\ntheorem c : True := True.intro\n");
    assert_eq!(r.status, Status::Failed);
    assert_eq!(r.diagnostics.len(), 2, "{:?}", r.diagnostics);
}

#[test]
fn parse_errors_are_diagnostics() {
    let r = check("theorem t : True := by\n  exact True.intro <;> rfl\n");
    assert_eq!(r.status, Status::Failed);
    assert_eq!(r.diagnostics[0].code.as_deref(), Some("UnsupportedTactic"));
}

#[test]
fn unknown_import() {
    let r = check("import Mathlib.Nonexistent\n");
    assert_eq!(r.diagnostics[0].code.as_deref(), Some("UnknownModule"));
}

#[test]
fn sorry_tainted_theorem_is_not_a_justification() {
    let src = "theorem s (a b : ℝ) : a + b = b + a := by sorry\ntheorem u (a b : ℝ) : a + b = b + a := by rw [s]\n";
    let r = check(src);
    assert_eq!(r.status, Status::Failed);
    let permissive = check_source("t", src, CheckOptions { allow_incomplete: true, ..CheckOptions::default() });
    assert_eq!(permissive.report.status, Status::SorryWarned);
}

#[test]
fn check_command() {
    let env = load_prelude();
    assert_eq!(check_cmd("#check Nat.succ", &env).unwrap(), "Nat.succ : ℕ → ℕ");
    assert_eq!(check_cmd("#check mul_comm", &env).unwrap(), "mul_comm : ∀ (a b : ℝ), a * b = b * a");
    assert_eq!(check_cmd("#check (1 : ℝ) + 1", &env).unwrap(), "1 + 1 : ℝ");
    assert!(check_cmd("#check nope", &env).is_err());
}

#[test]
fn reports_are_deterministic() {
    let src = corpus("mathd_algebra_270.mthm");
    let mut a = check(&src);
    let mut b = check(&src);
    a.elapsed = 0.0;
    b.elapsed = 0.0;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn report_json_shape() {
    let r = check("theorem t : True := by sorry\n");
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["status"], "SorryWarned");
    assert_eq!(v["diagnostics"][0]["severity"], "warning");
    assert!(v["elapsed"].is_number());
    assert!(v["path"].is_string());
}

#[test]
fn corpus_proofs_recheck() {
    for f in ["mul_comm_rewrites.mthm", "mathd_algebra_270.mthm"] {
        let res = check_source(f, &corpus(f), CheckOptions::default());
        assert!(!res.checked.is_empty());
        recheck(&res.checked, microprover::kernel::DEFAULT_FUEL).unwrap();
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let entries = load_corpus(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/manifest.tsv")).unwrap();
    let s = run_entries_sequential(&entries, CheckOptions::default());
    let p = run_entries(&entries, CheckOptions::default());
    let key = |c: &CorpusSummary| c.entries.iter().map(|e| (e.id.clone(), e.report.status)).collect::<Vec<_>>();
    assert_eq!(key(&s), key(&p));
    assert!(s.all_as_expected());
}

#[test]
fn line_and_column() {
    assert_eq!(line_col("ab\ncd", 4), (2, 2));
    assert_eq!(line_col("ℝx", 3), (1, 2));
}
