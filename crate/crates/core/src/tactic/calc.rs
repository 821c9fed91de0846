//! `calc`: chains of equations composed with `Eq.trans`.

use super::*;
use crate::syntax::ast::{BinOp, CalcStep, STermKind};

impl ProofState {
    pub(super) fn calc(&mut self, steps: &[CalcStep], span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let mut chain: Option<(Expr, Expr, Expr, Expr)> = None; // (T, first lhs, last rhs, proof)
        for (i, step) in steps.iter().enumerate() {
            let STermKind::Binary(BinOp::Eq, lhs, rhs) = &step.relation.kind else {
                return Err(TacticError::new(
                    TacticErrorKind::Failed,
                    step.relation.span,
                    "calc steps must be equations 'a = b'",
                ));
            };
            let lhs_term = match (&lhs.kind, &chain) {
                (STermKind::Placeholder, Some((_, _, prev, _))) => STerm::new(STermKind::Quoted(prev.clone()), lhs.span),
                (STermKind::Placeholder, None) => {
                    return Err(TacticError::new(
                        TacticErrorKind::CalcChainMismatch,
                        lhs.span,
                        "the first calc step must state its left-hand side",
                    ))
                }
                _ => (**lhs).clone(),
            };
            let rel = STerm::new(
                STermKind::Binary(BinOp::Eq, Box::new(lhs_term), rhs.clone()),
                step.relation.span,
            );
            let rel = self.with_elab(g, |el| {
                let (e, _) = el.elab(&rel, Some(&prop()))?;
                el.finalize(&e, rel.span)
            })?;
            let (ty, a, b) = eq_parts(&rel).expect("elaborated equation");
            if let Some((_, _, prev, _)) = &chain {
                if !self.unify_in(g, prev, &a) {
                    return Err(TacticError::new(
                        TacticErrorKind::CalcChainMismatch,
                        step.relation.span,
                        format!(
                            "calc step {} starts at {} but the previous step ended at {}",
                            i + 1,
                            self.render_in(g, &a),
                            self.render_in(g, prev)
                        ),
                    ));
                }
            }
            let pf = self.prove_sub(g, &rel, &step.proof, step.span)?;
            chain = Some(match chain {
                None => (ty, a, b, pf),
                Some((t, first, mid, acc)) => {
                    let p = mk_app(cnst("Eq.trans"), [t.clone(), first.clone(), mid, b.clone(), acc, pf]);
                    (t, first, b, p)
                }
            });
        }
        let (ty, first, last, pf) = chain.ok_or_else(|| TacticError::new(TacticErrorKind::Failed, span, "empty calc"))?;
        let target = self.goal_target(g);
        let rel = mk_app(cnst("Eq"), [ty, first, last]);
        if !self.unify_in(g, &rel, &target) {
            return Err(TacticError::new(
                TacticErrorKind::CalcEndpointMismatch,
                span,
                format!(
                    "calc proves {} but the goal is {}",
                    self.render_in(g, &rel),
                    self.render_in(g, &target)
                ),
            ));
        }
        self.mctx.assign(g, pf);
        self.replace_goal(g, &[]);
        Ok(())
    }
}
