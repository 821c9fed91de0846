//! Exact evaluation of closed literal arithmetic over the prelude carriers.
//!
//! This is the evaluator behind arithmetic certificates: the kernel accepts
//! `Cert(p)` as a proof of `p` only when [`decide`] returns `Ok(true)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::reduce::nat_value;
use crate::term::*;

const POW_LIMIT: u32 = 4096;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a closed numeral expression: {0}")]
    NotClosed(String),
    #[error("exponent too large")]
    ExponentTooLarge,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    Nat,
    Rat,
    Real,
}

impl Carrier {
    pub fn from_type(ty: &Expr) -> Option<Carrier> {
        match const_name(ty)?.as_str() {
            "Nat" => Some(Carrier::Nat),
            "Rat" => Some(Carrier::Rat),
            "Real" => Some(Carrier::Real),
            _ => None,
        }
    }

    pub fn type_name(self) -> &'static str {
        match self {
            Carrier::Nat => "Nat",
            Carrier::Rat => "Rat",
            Carrier::Real => "Real",
        }
    }

    /// `Real.add`, `Nat.mul`, ...
    pub fn op(self, op: &str) -> Name {
        Name::new(&format!("{}.{}", self.type_name(), op))
    }

    pub fn ty(self) -> Expr {
        cnst(self.type_name())
    }

    /// The literal `q` in this carrier (`q` must be a natural for `Nat`).
    pub fn literal(self, q: &BigRational) -> Expr {
        match self {
            Carrier::Nat => nat_lit(q.to_integer().to_biguint().unwrap_or_default()),
            Carrier::Rat => rat_lit(q.clone()),
            Carrier::Real => app(cnst("Real.ofRat"), rat_lit(q.clone())),
        }
    }

    pub fn of_op(name: &str) -> Option<(Carrier, &str)> {
        let (ty, op) = name.split_once('.')?;
        let c = match ty {
            "Nat" => Carrier::Nat,
            "Rat" => Carrier::Rat,
            "Real" => Carrier::Real,
            _ => return None,
        };
        Some((c, op))
    }
}

/// Value of a literal numeral term in any carrier, if it is one.
pub fn literal_value(e: &Expr) -> Option<BigRational> {
    match &**e {
        Term::RatLit(q) => Some(q.clone()),
        Term::App(f, x) if matches!(&**f, Term::Const(c) if c.as_str() == "Real.ofRat") => {
            literal_value(x)
        }
        _ => nat_value(e).map(|n| BigRational::from_integer(BigInt::from(n))),
    }
}

/// Evaluates a closed numeral expression.
pub fn eval(e: &Expr) -> Result<BigRational, ArithError> {
    if let Some(v) = literal_value(e) {
        return Ok(v);
    }
    let (head, args) = get_app_fn_args(e);
    let not_closed = || ArithError::NotClosed(format!("{e:?}"));
    let Term::Const(name) = &*head else {
        return Err(not_closed());
    };
    let (carrier, op) = Carrier::of_op(name.as_str()).ok_or_else(not_closed)?;
    match (op, args.as_slice()) {
        ("neg", [a]) if carrier != Carrier::Nat => Ok(-eval(a)?),
        ("inv", [a]) if carrier != Carrier::Nat => {
            let v = eval(a)?;
            if v.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            Ok(v.recip())
        }
        ("succ", [a]) if carrier == Carrier::Nat => Ok(eval(a)? + BigRational::from_integer(1.into())),
        ("add", [a, b]) => Ok(eval(a)? + eval(b)?),
        ("mul", [a, b]) => Ok(eval(a)? * eval(b)?),
        ("sub", [a, b]) => {
            let r = eval(a)? - eval(b)?;
            if carrier == Carrier::Nat && r.is_negative() {
                Ok(BigRational::zero())
            } else {
                Ok(r)
            }
        }
        ("div", [a, b]) => {
            let (x, y) = (eval(a)?, eval(b)?);
            if y.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            if carrier == Carrier::Nat {
                Ok(BigRational::from_integer(x.to_integer().div_floor(&y.to_integer())))
            } else {
                Ok(x / y)
            }
        }
        ("mod", [a, b]) if carrier == Carrier::Nat => {
            let (x, y) = (eval(a)?.to_integer(), eval(b)?.to_integer());
            if y.is_zero() {
                return Ok(BigRational::from_integer(x));
            }
            Ok(BigRational::from_integer(x.mod_floor(&y)))
        }
        ("pow", [a, b]) => {
            let base = eval(a)?;
            let exp = eval(b)?;
            let k = exp
                .to_integer()
                .to_u32()
                .filter(|k| *k <= POW_LIMIT)
                .ok_or(ArithError::ExponentTooLarge)?;
            Ok(num_traits::pow::pow(base, k as usize))
        }
        _ => Err(not_closed()),
    }
}

/// Decides a closed literal proposition.
pub fn decide(p: &Expr) -> Result<bool, ArithError> {
    let (head, args) = get_app_fn_args(p);
    let not_closed = || ArithError::NotClosed(format!("{p:?}"));
    let Term::Const(name) = &*head else {
        return Err(not_closed());
    };
    match (name.as_str(), args.as_slice()) {
        ("True", []) => Ok(true),
        ("False", []) => Ok(false),
        ("Not", [a]) => Ok(!decide(a)?),
        ("And", [a, b]) => Ok(decide(a)? && decide(b)?),
        ("Or", [a, b]) => Ok(decide(a)? || decide(b)?),
        ("Iff", [a, b]) => Ok(decide(a)? == decide(b)?),
        ("Eq", [ty, a, b]) | ("Ne", [ty, a, b]) => {
            Carrier::from_type(ty).ok_or_else(not_closed)?;
            let eq = eval(a)? == eval(b)?;
            Ok(if name.as_str() == "Eq" { eq } else { !eq })
        }
        ("Nat.dvd", [a, b]) => {
            let (x, y) = (eval(a)?.to_integer(), eval(b)?.to_integer());
            Ok(if x.is_zero() { y.is_zero() } else { (y % x).is_zero() })
        }
        (other, [a, b]) => match Carrier::of_op(other) {
            Some((_, "lt")) => Ok(eval(a)? < eval(b)?),
            Some((_, "le")) => Ok(eval(a)? <= eval(b)?),
            _ => Err(not_closed()),
        },
        _ => Err(not_closed()),
    }
}

/// Helper for callers that need the natural number behind a literal.
pub fn as_natural(q: &BigRational) -> Option<BigUint> {
    if q.is_integer() && !q.is_negative() {
        q.to_integer().to_biguint()
    } else {
        None
    }
}
