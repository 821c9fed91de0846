//! `norm_num`: optional lemma rewriting, then exact evaluation of the closed
//! arithmetic proposition, closed by an arithmetic certificate.

use super::*;
use crate::kernel::arith::{decide, ArithError};

/// Side conditions of rewrite lemmas are discharged recursively to this depth.
pub const NORM_NUM_DEPTH: u32 = 2;

impl ProofState {
    pub(super) fn norm_num(&mut self, g: MVarId, lemmas: &[STerm], depth: u32, span: Span) -> TResult<()> {
        let g = if lemmas.is_empty() {
            g
        } else {
            let d = (depth < NORM_NUM_DEPTH).then_some(depth);
            let (g, _) = self.rewrite_exhaustively(g, lemmas, d, span)?;
            g
        };
        let target = self.goal_target(g);
        match decide(&target) {
            Ok(true) => {
                self.mctx.assign(g, cert(target));
                self.replace_goal(g, &[]);
                Ok(())
            }
            Ok(false) => Err(TacticError::new(
                TacticErrorKind::NormNumFalse,
                span,
                format!("norm_num: the proposition is false: {}", self.render_in(g, &target)),
            )),
            Err(ArithError::DivisionByZero) => Err(TacticError::new(
                TacticErrorKind::DivisionByZero,
                span,
                format!("norm_num: division by zero in {}", self.render_in(g, &target)),
            )),
            Err(e) => {
                let saved = self.mctx.clone();
                if self.try_rfl(g) {
                    self.replace_goal(g, &[]);
                    return Ok(());
                }
                self.mctx = saved;
                let why = match e {
                    ArithError::ExponentTooLarge => "exponent too large",
                    _ => "the goal is not a closed arithmetic proposition",
                };
                Err(TacticError::new(
                    TacticErrorKind::NormNumNotClosed,
                    span,
                    format!("norm_num failed: {why}\n{}", self.render_goal(g)),
                ))
            }
        }
    }
}
