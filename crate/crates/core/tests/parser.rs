use microprover::syntax::parser::*;
use microprover::syntax::ast::*;

fn show(t: &STerm) -> String {
    match &t.kind {
        STermKind::Ident(s) => s.clone(),
        STermKind::Num(n) => n.to_string(),
        STermKind::Placeholder => "_".into(),
        STermKind::Sorry => "sorry".into(),
        STermKind::Sort(k) => format!("{k:?}"),
        STermKind::App(f, args) => {
            let args: Vec<_> = args.iter().map(show).collect();
            format!("({} {})", show(f), args.join(" "))
        }
        STermKind::Explicit(s) => format!("@{s}"),
        STermKind::Binary(op, a, b) => format!("({} {} {})", show(a), op.symbol(), show(b)),
        STermKind::Neg(a) => format!("(-{})", show(a)),
        STermKind::Inv(a) => format!("({}⁻¹)", show(a)),
        STermKind::Not(a) => format!("(¬{})", show(a)),
        STermKind::Arrow(a, b) => format!("({} → {})", show(a), show(b)),
        STermKind::Forall(bs, b) | STermKind::Exists(bs, b) | STermKind::Lambda(bs, b) => {
            let q = match &t.kind {
                STermKind::Forall(..) => "∀",
                STermKind::Exists(..) => "∃",
                _ => "fun",
            };
            let names: Vec<_> = bs.iter().map(|b| b.name.as_str()).collect();
            format!("({q} {}, {})", names.join(" "), show(b))
        }
        STermKind::Let(n, _, v, b) => format!("(let {n} := {}; {})", show(v), show(b)),
        STermKind::AnonCtor(xs) => {
            let xs: Vec<_> = xs.iter().map(show).collect();
            format!("⟨{}⟩", xs.join(", "))
        }
        STermKind::Ascription(a, b) => format!("({} : {})", show(a), show(b)),
        STermKind::Quoted(_) => "<quoted>".into(),
    }
}

fn p(src: &str) -> String {
    show(&parse_term(src).unwrap())
}

#[test]
fn products_are_left_associated_under_eq() {
    assert_eq!(p("c * b * a = b * (a * c)"), "(((c * b) * a) = (b * (a * c)))");
}

#[test]
fn forall_scopes_over_disjunction() {
    assert_eq!(
        p("∀ x y, f (x + f y) = f x + y ∨ f (f x + y) = x + f y"),
        "(∀ x y, (((f (x + (f y))) = ((f x) + y)) ∨ ((f ((f x) + y)) = (x + (f y)))))"
    );
}

#[test]
fn negation_sugar() {
    assert_eq!(p("¬P"), "(¬P)");
    assert_eq!(p("¬a = b ∧ Q"), "((¬(a = b)) ∧ Q)");
}

#[test]
fn precedence_table() {
    assert_eq!(p("A ↔ B → C ∨ D ∧ E"), "(A ↔ (B → (C ∨ (D ∧ E))))");
    assert_eq!(p("A → B → C"), "(A → (B → C))");
    assert_eq!(p("a + b * c ^ d ^ e"), "(a + (b * (c ^ (d ^ e))))");
    assert_eq!(p("a - b - c"), "((a - b) - c)");
    assert_eq!(p("-a * b"), "((-a) * b)");
    assert_eq!(p("-a ^ 2"), "(-(a ^ 2))");
    assert_eq!(p("p ^ n ∣ m"), "((p ^ n) ∣ m)");
    assert_eq!(p("f x⁻¹"), "(f (x⁻¹))");
}

#[test]
fn relations_do_not_chain() {
    assert!(parse_term("a = b = c").is_err());
}

#[test]
fn condition_definition() {
    let src = "def Condition (a b : ℕ) : Prop := 0 < a ∧ 0 < b ∧ ∃ g N : ℕ, 0 < g ∧ 0 < N ∧ ∀ n : ℕ, N ≤ n → Nat.gcd (a^n + b) (b^n + a) = g";
    let (cmds, errs) = parse_file(src);
    assert!(errs.is_empty(), "{errs:?}");
    let CommandKind::Def { name, binders, body, .. } = &cmds[0].kind else {
        panic!()
    };
    assert_eq!(name, "Condition");
    assert_eq!(binders.len(), 2);
    let s = show(body);
    assert!(s.contains("(∃ g N, "), "{s}");
}

#[test]
fn rewrite_script() {
    let src = "import Mathlib.Data.Real.Basic\n\nexample (a b c : ℝ) : c * b * a = b * (a * c) := by\n  rw [mul_comm c b]\n  rw [(mul_assoc b c a)]\n  rw [mul_comm c a]\n";
    let (cmds, errs) = parse_file(src);
    assert!(errs.is_empty(), "{errs:?}");
    assert!(matches!(&cmds[0].kind, CommandKind::Import(m) if m == "Mathlib.Data.Real.Basic"));
    let CommandKind::Theorem { name: None, proof: Proof::Tactics(ts), .. } = &cmds[1].kind else {
        panic!()
    };
    assert_eq!(ts.len(), 3);
    assert!(ts.iter().all(|t| matches!(&t.kind, TacticKind::Rw(r) if r.len() == 1)));
}

#[test]
fn calc_block_with_have() {
    let src = "theorem t (f : ℝ → ℝ) (h0 : ∀ x, x ≠ -5 → f x = 1 / (x + 5)) : f (f 1) = 6 / 31 := by
  have h1 : f 1 = 1 / 6 := by norm_num [h0]
  -- comment
  calc f (f 1) = f (1 / 6) := by rw [h1]
    _ = 1 / (1 / 6 + 5) := by norm_num [h0]
    _ = 1 / (31 / 6) := by norm_num
    _ = 6 / 31 := by norm_num
";
    let (cmds, errs) = parse_file(src);
    assert!(errs.is_empty(), "{errs:?}");
    let CommandKind::Theorem { proof: Proof::Tactics(ts), .. } = &cmds[0].kind else {
        panic!()
    };
    assert_eq!(ts.len(), 2);
    let TacticKind::Calc(steps) = &ts[1].kind else { panic!() };
    assert_eq!(steps.len(), 4);
    assert_eq!(show(&steps[3].relation), "(_ = (6 / 31))");
}

#[test]
fn simple_theorem_and_semicolons() {
    let (cmds, errs) = parse_file("theorem t : True := by exact True.intro");
    assert!(errs.is_empty() && cmds.len() == 1);
    let ts = parse_tactics("intro h; exact h").unwrap();
    assert_eq!(ts.len(), 2);
}

#[test]
fn unsupported_tactics() {
    let e = parse_tactics("linarith").unwrap_err();
    assert_eq!(e.kind, microprover::syntax::SyntaxErrorKind::UnsupportedTactic);
    let e = parse_tactics("simp <;> rfl").unwrap_err();
    assert_eq!(e.kind, microprover::syntax::SyntaxErrorKind::UnsupportedTactic);
}

#[test]
fn errors_recover_at_next_command() {
    let (cmds, errs) = parse_file("def x : ℕ := )\ntheorem t : True := True.intro");
    assert_eq!(errs.len(), 1);
    assert_eq!(cmds.len(), 1);
    assert!(errs[0].span.start < errs[0].span.end);
}

#[test]
fn inductive_declaration() {
    let (cmds, errs) = parse_file("inductive T : Type where\n  | leaf : T\n  | node (l r : T) : T");
    assert!(errs.is_empty(), "{errs:?}");
    let CommandKind::Inductive { ctors, .. } = &cmds[0].kind else { panic!() };
    assert_eq!(ctors.len(), 2);
    assert_eq!(ctors[1].binders.len(), 2);
}

#[test]
fn statements() {
    let s = parse_statement("example (a b c : ℝ) : c * b * a = b * (a * c) := by").unwrap();
    assert_eq!(s.binders.len(), 3);
    let s = parse_statement("∀ P : Prop, P → P").unwrap();
    assert!(s.binders.is_empty());
}
