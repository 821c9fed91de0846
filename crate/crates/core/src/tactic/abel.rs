//! Normalization in commutative monoids and groups, for `abel`.
//!
//! A term over one operation (`+` with `-`, or `*`) is flattened into a
//! sorted list of signed atoms with an optional leading literal. Every step
//! is justified by an instance of the carrier's associativity, commutativity,
//! identity and inverse lemmas, so the resulting proof is ordinary kernel
//! material; only literal folding (`2 + 3 = 5`) uses an arithmetic certificate.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::kernel::arith::{eval, Carrier};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Additive,
    Multiplicative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Item {
    Lit(BigRational),
    /// Atom index; `true` when negated.
    Atom(usize, bool),
}

fn cmp_items(a: &Item, b: &Item) -> Ordering {
    match (a, b) {
        (Item::Lit(_), Item::Lit(_)) => Ordering::Equal,
        (Item::Lit(_), _) => Ordering::Less,
        (_, Item::Lit(_)) => Ordering::Greater,
        (Item::Atom(i, s), Item::Atom(j, t)) => (i, s).cmp(&(j, t)),
    }
}

/// The normal form: a literal part plus atoms with (signed) multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub constant: BigRational,
    pub atoms: BTreeMap<usize, i64>,
}

/// `lhs = rhs` with its proof; `None` stands for reflexivity.
#[derive(Clone, Debug)]
struct Eqn {
    lhs: Expr,
    rhs: Expr,
    proof: Option<Expr>,
}

pub struct Normalizer {
    carrier: Carrier,
    mode: Mode,
    ty: Expr,
    pub atoms: Vec<Expr>,
}

fn abel_error(span: Span, msg: impl Into<String>) -> TacticError {
    TacticError::new(TacticErrorKind::AbelNonGroupTerm, span, msg)
}

impl Normalizer {
    pub fn new(carrier: Carrier, mode: Mode) -> Self {
        Normalizer {
            carrier,
            mode,
            ty: carrier.ty(),
            atoms: Vec::new(),
        }
    }

    fn lemma(&self, base: &str) -> Expr {
        match self.carrier {
            Carrier::Real => cnst(base),
            c => cnst(format!("{}.{base}", c.type_name()).as_str()),
        }
    }

    fn op_name(&self) -> &'static str {
        match self.mode {
            Mode::Additive => "add",
            Mode::Multiplicative => "mul",
        }
    }

    fn unit(&self) -> BigRational {
        match self.mode {
            Mode::Additive => BigRational::zero(),
            Mode::Multiplicative => BigRational::one(),
        }
    }

    fn op(&self, a: Expr, b: Expr) -> Expr {
        mk_app(cnst(self.carrier.op(self.op_name())), [a, b])
    }

    fn neg(&self, a: Expr) -> Expr {
        app(cnst(self.carrier.op("neg")), a)
    }

    fn lit(&self, q: &BigRational) -> Expr {
        self.carrier.literal(q)
    }

    fn term(&self, x: &Item) -> Expr {
        match x {
            Item::Lit(q) => self.lit(q),
            Item::Atom(i, false) => self.atoms[*i].clone(),
            Item::Atom(i, true) => self.neg(self.atoms[*i].clone()),
        }
    }

    fn eval_list(&self, l: &[Item]) -> Expr {
        match l {
            [] => self.lit(&self.unit()),
            [x] => self.term(x),
            [x, rest @ ..] => self.op(self.term(x), self.eval_list(rest)),
        }
    }

    // ---- equation combinators ----

    fn refl(&self, e: Expr) -> Eqn {
        Eqn {
            lhs: e.clone(),
            rhs: e,
            proof: None,
        }
    }

    fn axiom(&self, name: &str, args: Vec<Expr>, lhs: Expr, rhs: Expr) -> Eqn {
        Eqn {
            lhs,
            rhs,
            proof: Some(mk_app(self.lemma(name), args)),
        }
    }

    fn cert(&self, lhs: Expr, rhs: Expr) -> Eqn {
        if alpha_eq(&lhs, &rhs) {
            return self.refl(lhs);
        }
        let p = mk_app(cnst("Eq"), [self.ty.clone(), lhs.clone(), rhs.clone()]);
        Eqn {
            lhs,
            rhs,
            proof: Some(cert(p)),
        }
    }

    fn trans(&self, p: Eqn, q: Eqn) -> Eqn {
        let proof = match (p.proof, q.proof) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(mk_app(
                cnst("Eq.trans"),
                [self.ty.clone(), p.lhs.clone(), p.rhs, q.rhs.clone(), a, b],
            )),
        };
        Eqn {
            lhs: p.lhs,
            rhs: q.rhs,
            proof,
        }
    }

    fn symm(&self, p: Eqn) -> Eqn {
        let proof = p
            .proof
            .map(|h| mk_app(cnst("Eq.symm"), [self.ty.clone(), p.lhs.clone(), p.rhs.clone(), h]));
        Eqn {
            lhs: p.rhs,
            rhs: p.lhs,
            proof,
        }
    }

    /// From `h : a = b`, `f a = f b` where `f = fun t => ctx[t]`.
    fn congr_arg(&self, f: Expr, h: Eqn, lhs: Expr, rhs: Expr) -> Eqn {
        let proof = h.proof.map(|p| {
            mk_app(
                cnst("congrArg"),
                [self.ty.clone(), self.ty.clone(), h.lhs.clone(), h.rhs.clone(), f, p],
            )
        });
        Eqn { lhs, rhs, proof }
    }

    fn congr_op(&self, p: Eqn, q: Eqn) -> Eqn {
        let binder = || Binder::new("t", self.ty.clone());
        let left_f = lam(binder(), self.op(bvar(0), q.lhs.clone()));
        let s1 = self.congr_arg(
            left_f,
            p.clone(),
            self.op(p.lhs.clone(), q.lhs.clone()),
            self.op(p.rhs.clone(), q.lhs.clone()),
        );
        let right_f = lam(binder(), self.op(p.rhs.clone(), bvar(0)));
        let s2 = self.congr_arg(
            right_f,
            q.clone(),
            self.op(p.rhs.clone(), q.lhs.clone()),
            self.op(p.rhs.clone(), q.rhs.clone()),
        );
        self.trans(s1, s2)
    }

    fn congr_neg(&self, p: Eqn) -> Eqn {
        let f = lam(Binder::new("t", self.ty.clone()), self.neg(bvar(0)));
        let (l, r) = (self.neg(p.lhs.clone()), self.neg(p.rhs.clone()));
        self.congr_arg(f, p, l, r)
    }

    // ---- lemma instances ----

    fn assoc(&self, a: Expr, b: Expr, c: Expr) -> Eqn {
        let name = if self.mode == Mode::Additive { "add_assoc" } else { "mul_assoc" };
        let lhs = self.op(self.op(a.clone(), b.clone()), c.clone());
        let rhs = self.op(a.clone(), self.op(b.clone(), c.clone()));
        self.axiom(name, vec![a, b, c], lhs, rhs)
    }

    fn comm(&self, a: Expr, b: Expr) -> Eqn {
        let name = if self.mode == Mode::Additive { "add_comm" } else { "mul_comm" };
        let (lhs, rhs) = (self.op(a.clone(), b.clone()), self.op(b.clone(), a.clone()));
        self.axiom(name, vec![a, b], lhs, rhs)
    }

    fn left_comm(&self, a: Expr, b: Expr, c: Expr) -> Eqn {
        let name = if self.mode == Mode::Additive { "add_left_comm" } else { "mul_left_comm" };
        let lhs = self.op(a.clone(), self.op(b.clone(), c.clone()));
        let rhs = self.op(b.clone(), self.op(a.clone(), c.clone()));
        self.axiom(name, vec![a, b, c], lhs, rhs)
    }

    fn unit_right(&self, a: Expr) -> Eqn {
        let name = if self.mode == Mode::Additive { "add_zero" } else { "mul_one" };
        let lhs = self.op(a.clone(), self.lit(&self.unit()));
        self.axiom(name, vec![a.clone()], lhs, a)
    }

    fn unit_left(&self, a: Expr) -> Eqn {
        let name = if self.mode == Mode::Additive { "zero_add" } else { "one_mul" };
        let lhs = self.op(self.lit(&self.unit()), a.clone());
        self.axiom(name, vec![a.clone()], lhs, a)
    }

    // ---- list operations ----

    fn cancels(&self, x: &Item, y: &Item) -> bool {
        matches!((x, y), (Item::Atom(i, s), Item::Atom(j, t)) if i == j && s != t)
    }

    /// `x + (-x) = 0` or `-x + x = 0`.
    fn cancel(&self, x: &Item, y: &Item) -> Eqn {
        let (lhs, rhs) = (self.op(self.term(x), self.term(y)), self.lit(&self.unit()));
        let Item::Atom(i, negated) = x else { unreachable!() };
        let name = if *negated { "neg_add_cancel" } else { "add_neg_cancel" };
        self.axiom(name, vec![self.atoms[*i].clone()], lhs, rhs)
    }

    fn combine(&self, p: &BigRational, q: &BigRational) -> BigRational {
        match self.mode {
            Mode::Additive => p + q,
            Mode::Multiplicative => p * q,
        }
    }

    /// `y ∘ eval(l) = eval(y :: l)`.
    fn cons(&self, y: &Item, l: &[Item]) -> Eqn {
        if l.is_empty() {
            self.unit_right(self.term(y))
        } else {
            self.refl(self.op(self.term(y), self.eval_list(l)))
        }
    }

    /// `x ∘ eval(l) = eval(result)`.
    fn insert(&self, x: &Item, l: &[Item]) -> (Vec<Item>, Eqn) {
        let ex = self.term(x);
        let Some((y, rest)) = l.split_first() else {
            return (vec![x.clone()], self.unit_right(ex));
        };
        let el = self.eval_list(l);
        match (x, y) {
            (Item::Lit(p), Item::Lit(q)) => {
                let v = self.combine(p, q);
                let folded = self.cert(self.op(ex.clone(), self.term(y)), self.lit(&v));
                if rest.is_empty() {
                    let out = if v == self.unit() { vec![] } else { vec![Item::Lit(v)] };
                    return (out, folded);
                }
                let er = self.eval_list(rest);
                let s1 = self.symm(self.assoc(ex, self.term(y), er.clone()));
                let s2 = self.congr_op(folded, self.refl(er.clone()));
                let s = self.trans(s1, s2);
                if v == self.unit() {
                    (rest.to_vec(), self.trans(s, self.unit_left(er)))
                } else {
                    let mut out = vec![Item::Lit(v)];
                    out.extend_from_slice(rest);
                    (out, s)
                }
            }
            (Item::Lit(_), _) => {
                let mut out = vec![x.clone()];
                out.extend_from_slice(l);
                (out, self.refl(self.op(ex, el)))
            }
            _ if self.cancels(x, y) => {
                if rest.is_empty() {
                    return (vec![], self.cancel(x, y));
                }
                let er = self.eval_list(rest);
                let s1 = self.symm(self.assoc(ex, self.term(y), er.clone()));
                let s2 = self.congr_op(self.cancel(x, y), self.refl(er.clone()));
                let s3 = self.unit_left(er);
                (rest.to_vec(), self.trans(self.trans(s1, s2), s3))
            }
            _ if cmp_items(y, x) == Ordering::Less => {
                if rest.is_empty() {
                    return (vec![y.clone(), x.clone()], self.comm(ex, self.term(y)));
                }
                let er = self.eval_list(rest);
                let s1 = self.left_comm(ex, self.term(y), er);
                let (r2, p) = self.insert(x, rest);
                let s2 = self.congr_op(self.refl(self.term(y)), p);
                let s3 = self.cons(y, &r2);
                let mut out = vec![y.clone()];
                out.extend(r2);
                (out, self.trans(self.trans(s1, s2), s3))
            }
            _ => {
                let mut out = vec![x.clone()];
                out.extend_from_slice(l);
                (out, self.refl(self.op(ex, el)))
            }
        }
    }

    /// `eval(l1) ∘ eval(l2) = eval(result)`.
    fn merge(&self, l1: &[Item], l2: &[Item]) -> (Vec<Item>, Eqn) {
        match l1 {
            [] => (l2.to_vec(), self.unit_left(self.eval_list(l2))),
            _ if l2.is_empty() => (l1.to_vec(), self.unit_right(self.eval_list(l1))),
            [x] => self.insert(x, l2),
            [x, r1 @ ..] => {
                let s1 = self.assoc(self.term(x), self.eval_list(r1), self.eval_list(l2));
                let (m, p) = self.merge(r1, l2);
                let s2 = self.congr_op(self.refl(self.term(x)), p);
                let (m2, q) = self.insert(x, &m);
                (m2, self.trans(self.trans(s1, s2), q))
            }
        }
    }

    fn negate_item(&self, x: &Item) -> (Item, Eqn) {
        let lhs = self.neg(self.term(x));
        match x {
            Item::Lit(q) => {
                let y = Item::Lit(-q.clone());
                let rhs = self.term(&y);
                (y, self.cert(lhs, rhs))
            }
            Item::Atom(i, false) => (Item::Atom(*i, true), self.refl(lhs)),
            Item::Atom(i, true) => {
                let a = self.atoms[*i].clone();
                (Item::Atom(*i, false), self.axiom("neg_neg", vec![a.clone()], lhs, a))
            }
        }
    }

    /// `-eval(l) = eval(result)`.
    fn negate(&self, l: &[Item]) -> (Vec<Item>, Eqn) {
        match l {
            [] => {
                let z = self.lit(&BigRational::zero());
                let lhs = self.neg(z.clone());
                (vec![], self.axiom("neg_zero", vec![], lhs, z))
            }
            [x] => {
                let (y, p) = self.negate_item(x);
                (vec![y], p)
            }
            [x, rest @ ..] => {
                let (ex, er) = (self.term(x), self.eval_list(rest));
                let lhs = self.neg(self.op(ex.clone(), er.clone()));
                let rhs = self.op(self.neg(ex.clone()), self.neg(er.clone()));
                let s1 = self.axiom("neg_add", vec![ex, er], lhs, rhs);
                let (y, p) = self.negate_item(x);
                let (r2, q) = self.negate(rest);
                let s2 = self.congr_op(p, q);
                let mut out = vec![y];
                out.extend(r2);
                (out, self.trans(s1, s2))
            }
        }
    }

    fn atom(&mut self, t: &Expr) -> usize {
        if let Some(i) = self.atoms.iter().position(|a| alpha_eq(a, t)) {
            return i;
        }
        self.atoms.push(t.clone());
        self.atoms.len() - 1
    }

    fn binary(&self, t: &Expr, op: &str) -> Option<(Expr, Expr)> {
        let args = match_const_app(t, self.carrier.op(op).as_str(), 2)?;
        Some((args[0].clone(), args[1].clone()))
    }

    /// `t = eval(result)`.
    fn norm(&mut self, t: &Expr, span: Span) -> TResult<(Vec<Item>, Eqn)> {
        if let Some((a, b)) = self.binary(t, self.op_name()) {
            let (la, pa) = self.norm(&a, span)?;
            let (lb, pb) = self.norm(&b, span)?;
            let c = self.congr_op(pa, pb);
            let (m, p) = self.merge(&la, &lb);
            return Ok((m, self.trans(c, p)));
        }
        if self.mode == Mode::Additive {
            if self.carrier == Carrier::Nat {
                if self.binary(t, "sub").is_some() {
                    return Err(abel_error(span, "abel: truncated subtraction on ℕ is not a group operation"));
                }
            } else {
                if let Some(args) = match_const_app(t, self.carrier.op("neg").as_str(), 1) {
                    let (la, pa) = self.norm(&args[0], span)?;
                    let c = self.congr_neg(pa);
                    let (m, p) = self.negate(&la);
                    return Ok((m, self.trans(c, p)));
                }
                if let Some((a, b)) = self.binary(t, "sub") {
                    let rewritten = self.op(a.clone(), self.neg(b.clone()));
                    let s = self.axiom("sub_eq_add_neg", vec![a, b], t.clone(), rewritten.clone());
                    let (m, p) = self.norm(&rewritten, span)?;
                    return Ok((m, self.trans(s, p)));
                }
            }
        }
        if let Ok(v) = eval(t) {
            if v == self.unit() {
                return Ok((vec![], self.cert(t.clone(), self.lit(&v))));
            }
            let lit = self.lit(&v);
            return Ok((vec![Item::Lit(v)], self.cert(t.clone(), lit)));
        }
        let i = self.atom(t);
        Ok((vec![Item::Atom(i, false)], self.refl(t.clone())))
    }

    /// Normal form of `t` (atoms are recorded in `self.atoms`).
    pub fn normal_form(&mut self, t: &Expr) -> TResult<NormalForm> {
        let (items, _) = self.norm(t, Span::default())?;
        let mut nf = NormalForm {
            constant: self.unit(),
            atoms: BTreeMap::new(),
        };
        for it in items {
            match it {
                Item::Lit(q) => nf.constant = q,
                Item::Atom(i, neg) => *nf.atoms.entry(i).or_insert(0) += if neg { -1 } else { 1 },
            }
        }
        Ok(nf)
    }
}

fn head_op(e: &Expr) -> Option<(Carrier, String)> {
    let n = const_name(get_app_fn(e))?;
    Carrier::of_op(n.as_str()).map(|(c, op)| (c, op.to_string()))
}

/// Chooses additive mode if either side is built from `+`, `-`, and
/// multiplicative mode if built from `*`.
pub fn choose_mode(lhs: &Expr, rhs: &Expr) -> Mode {
    let ops: Vec<String> = [lhs, rhs].iter().filter_map(|e| head_op(e)).map(|(_, o)| o).collect();
    if ops.iter().any(|o| matches!(o.as_str(), "add" | "sub" | "neg")) {
        Mode::Additive
    } else if ops.iter().any(|o| o == "mul") {
        Mode::Multiplicative
    } else {
        Mode::Additive
    }
}

impl ProofState {
    pub(super) fn abel(&mut self, span: Span) -> TResult<()> {
        let g = self.main_goal(span)?;
        let target = self.goal_target(g);
        let t = if eq_parts(&target).is_some() { target.clone() } else { self.whnf_in(g, &target) };
        let Some((ty, lhs, rhs)) = eq_parts(&t) else {
            return Err(abel_error(
                span,
                format!("abel: the goal is not an equation: {}", self.render_in(g, &target)),
            ));
        };
        let ty = self.whnf_in(g, &ty);
        let Some(carrier) = Carrier::from_type(&ty) else {
            return Err(abel_error(
                span,
                format!("abel: {} is not a commutative group or monoid", self.render_in(g, &ty)),
            ));
        };
        let mut n = Normalizer::new(carrier, choose_mode(&lhs, &rhs));
        let (l1, p1) = n.norm(&lhs, span)?;
        let (l2, p2) = n.norm(&rhs, span)?;
        if l1 != l2 {
            return Err(TacticError::new(
                TacticErrorKind::Failed,
                span,
                format!(
                    "abel failed: normal forms differ\n  {}\n  {}",
                    self.render_in(g, &n.eval_list(&l1)),
                    self.render_in(g, &n.eval_list(&l2))
                ),
            ));
        }
        let eq = n.trans(p1, n.symm(p2));
        let pf = match eq.proof {
            Some(p) => p,
            None => mk_app(cnst("Eq.refl"), [n.ty.clone(), lhs]),
        };
        self.mctx.assign(g, pf);
        Ok(())
    }
}
