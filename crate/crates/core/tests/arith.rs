use microprover::kernel::arith::*;
use microprover::term::*;
use num_rational::BigRational;

fn real(n: i64) -> Expr {
    Carrier::Real.literal(&BigRational::from_integer(n.into()))
}

fn op(name: &str, a: Expr, b: Expr) -> Expr {
    mk_app(cnst(name), [a, b])
}

fn eq_real(a: Expr, b: Expr) -> Expr {
    mk_app(cnst("Eq"), [cnst("Real"), a, b])
}

#[test]
fn reciprocal_chain_final_step() {
    // 1 / (1/6 + 5) = 6/31
    let lhs = op(
        "Real.div",
        real(1),
        op("Real.add", op("Real.div", real(1), real(6)), real(5)),
    );
    let rhs = op("Real.div", real(6), real(31));
    assert_eq!(decide(&eq_real(lhs, rhs)), Ok(true));
}

#[test]
fn false_equation() {
    assert_eq!(decide(&eq_real(real(2), real(3))), Ok(false));
}

#[test]
fn division_by_zero() {
    let e = eq_real(op("Real.div", real(1), real(0)), real(0));
    assert_eq!(decide(&e), Err(ArithError::DivisionByZero));
}

#[test]
fn nat_subtraction_truncates() {
    let e = mk_app(
        cnst("Eq"),
        [cnst("Nat"), op("Nat.sub", nat_lit(2u32), nat_lit(5u32)), nat_lit(0u32)],
    );
    assert_eq!(decide(&e), Ok(true));
}

#[test]
fn free_variables_are_not_closed() {
    let e = eq_real(cnst("x"), real(1));
    assert!(matches!(decide(&e), Err(ArithError::NotClosed(_))));
}
