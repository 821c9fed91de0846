//! Rendering kernel terms back into reparseable surface syntax.

use super::ast::{prec, Assoc, BinOp};
use crate::env::Environment;
use crate::kernel::arith::{literal_value, Carrier};
use crate::term::*;

pub fn print_expr(env: &Environment, lctx: &LocalContext, e: &Expr) -> String {
    Printer::new(env, lctx).pp(e).0
}

/// One rendered hypothesis: `name : type` (plus `:= value` for lets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypLine {
    pub name: String,
    pub ty: String,
    pub value: Option<String>,
}

pub fn render_hyps(env: &Environment, lctx: &LocalContext) -> Vec<HypLine> {
    let p = Printer::new(env, lctx);
    lctx.iter()
        .map(|d| HypLine {
            name: p.fvar_name(d.fvar),
            ty: p.clone().pp(&d.ty).0,
            value: d.value.as_ref().map(|v| p.clone().pp(v).0),
        })
        .collect()
}

/// The goal as shown to users: grouped hypotheses, then `⊢ target`.
pub fn render_goal(env: &Environment, lctx: &LocalContext, target: &Expr) -> String {
    let mut lines: Vec<(Vec<String>, String, Option<String>)> = Vec::new();
    for h in render_hyps(env, lctx) {
        match lines.last_mut() {
            Some((names, ty, None)) if h.value.is_none() && *ty == h.ty => names.push(h.name),
            _ => lines.push((vec![h.name], h.ty, h.value)),
        }
    }
    let mut out = String::new();
    for (names, ty, value) in lines {
        out.push_str(&names.join(" "));
        out.push_str(" : ");
        out.push_str(&ty);
        if let Some(v) = value {
            out.push_str(" := ");
            out.push_str(&v);
        }
        out.push('\n');
    }
    out.push_str("⊢ ");
    out.push_str(&print_expr(env, lctx, target));
    out
}

pub fn display_const(name: &Name) -> &str {
    match name.as_str() {
        "Real" => "ℝ",
        "Rat" => "ℚ",
        "Nat" => "ℕ",
        other => other,
    }
}

fn binop_of(name: &str, nargs: usize) -> Option<BinOp> {
    if nargs == 2 {
        match name {
            "And" => return Some(BinOp::And),
            "Or" => return Some(BinOp::Or),
            "Iff" => return Some(BinOp::Iff),
            "Nat.dvd" => return Some(BinOp::Dvd),
            _ => {}
        }
        let (_, op) = Carrier::of_op(name)?;
        return Some(match op {
            "add" => BinOp::Add,
            "sub" => BinOp::Sub,
            "mul" => BinOp::Mul,
            "div" => BinOp::Div,
            "pow" => BinOp::Pow,
            "lt" => BinOp::Lt,
            "le" => BinOp::Le,
            _ => return None,
        });
    }
    if nargs == 3 {
        return match name {
            "Eq" => Some(BinOp::Eq),
            "Ne" => Some(BinOp::Ne),
            _ => None,
        };
    }
    None
}

/// Built only from literals and carrier operations.
fn is_numeral_expr(e: &Expr) -> bool {
    if literal_value(e).is_some() {
        return true;
    }
    let (f, args) = get_app_fn_args(e);
    match const_name(&f).and_then(|n| Carrier::of_op(n.as_str())) {
        Some((_, op)) if matches!(op, "add" | "sub" | "mul" | "div" | "pow" | "neg" | "inv") => {
            args.iter().all(is_numeral_expr)
        }
        _ => false,
    }
}

#[derive(Clone)]
struct Printer<'a> {
    env: &'a Environment,
    lctx: &'a LocalContext,
    /// Display names of enclosing binders, innermost last.
    names: Vec<String>,
}

impl<'a> Printer<'a> {
    fn new(env: &'a Environment, lctx: &'a LocalContext) -> Self {
        Printer {
            env,
            lctx,
            names: Vec::new(),
        }
    }

    fn fvar_name(&self, id: FVarId) -> String {
        let decls = self.lctx.decls();
        match decls.iter().position(|d| d.fvar == id) {
            Some(i) => {
                let name = &decls[i].user_name;
                if decls[i + 1..].iter().any(|d| d.user_name == *name) {
                    format!("{name}✝")
                } else {
                    name.clone()
                }
            }
            None => format!("?fvar.{}", id.0),
        }
    }

    fn taken(&self, n: &str) -> bool {
        self.names.iter().any(|m| m == n) || self.lctx.find_by_name(n).is_some()
    }

    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
        if !self.taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.taken(n))
            .expect("unbounded")
    }

    fn wrap((s, p): (String, u8), need: u8) -> String {
        if p < need {
            format!("({s})")
        } else {
            s
        }
    }

    fn sub(&mut self, e: &Expr, need: u8) -> String {
        let r = self.pp(e);
        Self::wrap(r, need)
    }

    fn pp(&mut self, e: &Expr) -> (String, u8) {
        match &**e {
            Term::BVar(i) => {
                let n = self.names.len();
                match n.checked_sub(*i as usize + 1) {
                    Some(k) => (self.names[k].clone(), prec::ATOM),
                    None => (format!("#{i}"), prec::ATOM),
                }
            }
            Term::FVar(id) => (self.fvar_name(*id), prec::ATOM),
            Term::MVar(id) => (format!("?m.{}", id.0), prec::ATOM),
            Term::Sort(l) => match l.0 {
                0 => ("Prop".into(), prec::ATOM),
                1 => ("Type".into(), prec::ATOM),
                n => (format!("Type {}", n - 1), prec::APP),
            },
            Term::Const(c) => (display_const(c).to_string(), prec::ATOM),
            Term::NatLit(n) => (n.to_string(), prec::ATOM),
            Term::RatLit(q) => {
                if q.is_integer() {
                    let n = q.to_integer();
                    if n.sign() == num_bigint::Sign::Minus {
                        (format!("-{}", -n), prec::NEG)
                    } else {
                        (n.to_string(), prec::ATOM)
                    }
                } else {
                    let num = q.numer().clone();
                    let s = format!("{} / {}", num.magnitude(), q.denom());
                    if num.sign() == num_bigint::Sign::Minus {
                        (format!("-({s})"), prec::NEG)
                    } else {
                        (s, prec::MUL)
                    }
                }
            }
            Term::Cert(p) => (format!("normNumCert {}", self.sub(p, prec::ATOM)), prec::APP),
            Term::App(..) => self.pp_app(e),
            Term::Pi(..) => self.pp_pi(e),
            Term::Lam(..) => self.pp_lam(e),
            Term::Let(b, v, body) => {
                let ty = self.sub(&b.ty, 0);
                let val = self.sub(v, 0);
                let name = self.fresh(&b.name);
                self.names.push(name.clone());
                let body = self.sub(body, 0);
                self.names.pop();
                (format!("let {name} : {ty} := {val}; {body}"), 0)
            }
        }
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr) -> (String, u8) {
        let p = op.prec();
        let (na, nb) = match op.assoc() {
            Assoc::Left => (p, p + 1),
            Assoc::Right => (p + 1, p),
            Assoc::None => (p + 1, p + 1),
        };
        let sa = self.sub(a, na);
        let sb = self.sub(b, nb);
        (format!("{sa} {} {sb}", op.symbol()), p)
    }

    fn explicit_mask(&self, f: &Expr, nargs: usize) -> Vec<bool> {
        let mut mask = vec![true; nargs];
        let Some(name) = const_name(f) else {
            return mask;
        };
        let Some(decl) = self.env.get(name) else {
            return mask;
        };
        let mut ty = &decl.ty;
        for m in mask.iter_mut() {
            match &**ty {
                Term::Pi(b, body) => {
                    *m = b.info == BinderInfo::Default;
                    ty = body;
                }
                _ => break,
            }
        }
        mask
    }

    fn pp_app(&mut self, e: &Expr) -> (String, u8) {
        let (f, args) = get_app_fn_args(e);
        if let Some(name) = const_name(&f) {
            let name = name.as_str();
            if let Some(op) = binop_of(name, args.len()) {
                let (a, b) = (&args[args.len() - 2], &args[args.len() - 1]);
                let carrier = match op {
                    BinOp::Eq | BinOp::Ne => Carrier::from_type(&args[0]),
                    BinOp::Lt | BinOp::Le => Carrier::of_op(name).map(|c| c.0),
                    _ => None,
                };
                if let Some(c) = carrier.filter(|c| *c != Carrier::Nat) {
                    if is_numeral_expr(a) && is_numeral_expr(b) {
                        let sa = self.sub(a, 0);
                        let sb = self.sub(b, op.prec() + 1);
                        let ty = display_const(&Name::new(c.type_name())).to_string();
                        return (format!("({sa} : {ty}) {} {sb}", op.symbol()), op.prec());
                    }
                }
                return self.binary(op, a, b);
            }
            match (name, args.as_slice()) {
                ("Not", [p]) => {
                    let s = self.sub(p, prec::REL);
                    return (format!("¬{s}"), prec::NOT);
                }
                ("Real.ofRat", [q]) if matches!(&**q, Term::RatLit(_)) => return self.pp(q),
                ("Exists", [_, body]) if matches!(&**body, Term::Lam(..)) => return self.pp_exists(e),
                _ => {}
            }
            if let Some((c, op)) = Carrier::of_op(name) {
                match (op, args.as_slice()) {
                    ("neg", [a]) if c != Carrier::Nat => {
                        let s = self.sub(a, prec::POW);
                        let s = if s.starts_with('-') { format!("({s})") } else { s };
                        return (format!("-{s}"), prec::NEG);
                    }
                    ("inv", [a]) if c != Carrier::Nat => {
                        let s = self.sub(a, prec::ATOM);
                        return (format!("{s}⁻¹"), prec::ATOM);
                    }
                    _ => {}
                }
            }
        }
        let mask = self.explicit_mask(&f, args.len());
        let mut out = self.sub(&f, prec::APP);
        let mut any = false;
        for (a, shown) in args.iter().zip(mask) {
            if shown {
                out.push(' ');
                out.push_str(&self.sub(a, prec::ATOM));
                any = true;
            }
        }
        (out, if any { prec::APP } else { prec::ATOM })
    }

    fn pp_exists(&mut self, e: &Expr) -> (String, u8) {
        let mut names = Vec::new();
        let mut cur = e.clone();
        let mut ty_str = None;
        let mut first_ty: Option<Expr> = None;
        let pushed = self.names.len();
        loop {
            let Some(args) = match_const_app(&cur, "Exists", 2) else {
                break;
            };
            let Term::Lam(b, body) = &*args[1] else {
                break;
            };
            // Group while the binder type stays the same.
            if let Some(t) = &first_ty {
                if !alpha_eq(&lift_loose(t, 0, names.len() as u32), &b.ty) {
                    break;
                }
            } else {
                ty_str = Some(self.sub(&b.ty, 0));
                first_ty = Some(b.ty.clone());
            }
            let name = self.fresh(&b.name);
            self.names.push(name.clone());
            names.push(name);
            cur = body.clone();
        }
        let body = self.sub(&cur, 0);
        self.names.truncate(pushed);
        (
            format!("∃ {} : {}, {body}", names.join(" "), ty_str.unwrap_or_default()),
            0,
        )
    }

    fn pp_pi(&mut self, e: &Expr) -> (String, u8) {
        let Term::Pi(b, body) = &**e else { unreachable!() };
        if b.info == BinderInfo::Default && !has_loose_bvar(body, 0) {
            let a = self.sub(&b.ty, prec::ARROW + 1);
            self.names.push("_".into());
            let r = self.sub(body, prec::ARROW);
            self.names.pop();
            return (format!("{a} → {r}"), prec::ARROW);
        }
        let pushed = self.names.len();
        let mut groups = String::new();
        let mut cur = e.clone();
        while let Term::Pi(b, body) = &*cur {
            if b.info == BinderInfo::Default && !has_loose_bvar(body, 0) {
                break;
            }
            let ty = b.ty.clone();
            let info = b.info;
            let mut names = vec![];
            let ty_s = self.sub(&ty, 0);
            let mut next = cur.clone();
            while let Term::Pi(b2, body2) = &*next {
                let same = b2.info == info
                    && alpha_eq(&b2.ty, &lift_loose(&ty, 0, names.len() as u32))
                    && (info == BinderInfo::Implicit || has_loose_bvar(body2, 0));
                if !same {
                    break;
                }
                let n = self.fresh(&b2.name);
                self.names.push(n.clone());
                names.push(n);
                next = body2.clone();
            }
            let (l, r) = if info == BinderInfo::Implicit { ("{", "}") } else { ("(", ")") };
            if !groups.is_empty() {
                groups.push(' ');
            }
            groups.push_str(&format!("{l}{} : {ty_s}{r}", names.join(" ")));
            cur = next;
        }
        let body = self.sub(&cur, 0);
        self.names.truncate(pushed);
        (format!("∀ {groups}, {body}"), 0)
    }

    fn pp_lam(&mut self, e: &Expr) -> (String, u8) {
        let pushed = self.names.len();
        let mut binders = Vec::new();
        let mut cur = e.clone();
        while let Term::Lam(b, body) = &*cur {
            let ty = self.sub(&b.ty, 0);
            let name = if b.name == "_" && !has_loose_bvar(body, 0) {
                "_".to_string()
            } else {
                self.fresh(&b.name)
            };
            self.names.push(name.clone());
            let (l, r) = if b.info == BinderInfo::Implicit { ("{", "}") } else { ("(", ")") };
            binders.push(format!("{l}{name} : {ty}{r}"));
            cur = body.clone();
        }
        let body = self.sub(&cur, 0);
        self.names.truncate(pushed);
        (format!("fun {} => {body}", binders.join(" ")), 0)
    }
}
