#![allow(dead_code)]

use microprover::elab::command::elab_statement;
use microprover::elab::ElabOptions;
use microprover::kernel::TypeChecker;
use microprover::prelude::load_prelude;
use microprover::syntax::parser::{parse_statement, parse_tactics};
use microprover::tactic::{ProofState, TResult};

pub fn start(stmt: &str) -> ProofState {
    let env = load_prelude();
    let st = parse_statement(stmt).unwrap();
    let (lctx, target) = elab_statement(&env, &st.binders, &st.statement, ElabOptions::default()).unwrap();
    ProofState::new(&env, &lctx, &target).unwrap()
}

pub fn run(s: &ProofState, tacs: &str) -> TResult<ProofState> {
    s.run_all(&parse_tactics(tacs).unwrap())
}

/// Type-checks the finished proof against the original goal from scratch.
pub fn recheck(s: &ProofState) -> bool {
    let Some(p) = s.proof() else { return false };
    let d = s.mctx.decl(s.root);
    let mut tc = TypeChecker::with_context(&s.env, d.lctx.clone());
    tc.check(&p, &d.ty).is_ok()
}

pub fn target(s: &ProofState) -> String {
    s.goal_report(s.goals[0]).target
}
