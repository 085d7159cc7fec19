use alloc::boxed::Box;

use super::{Branch, PathError};
use crate::cfg::{Cond, Expr};
use crate::frontend::ArithOp;

fn constant(e: &Expr) -> Option<i64> {
    match e {
        Expr::Lit(v) => Some(*v),
        Expr::Neg(a) => constant(a)?.checked_neg(),
        Expr::Bin(op, a, b) => {
            let (x, y) = (constant(a)?, constant(b)?);
            match op {
                ArithOp::Add => x.checked_add(y),
                ArithOp::Sub => x.checked_sub(y),
                ArithOp::Mul => x.checked_mul(y),
            }
        }
        _ => None,
    }
}

fn subst_expr(e: &Expr, name: &str, v: i64) -> Expr {
    match e {
        Expr::Bound(n) if n == name => Expr::Lit(v),
        Expr::Lit(_) | Expr::Var(_) | Expr::Bound(_) => e.clone(),
        Expr::Read(a, i) => Expr::Read(a.clone(), Box::new(subst_expr(i, name, v))),
        Expr::Neg(a) => Expr::Neg(Box::new(subst_expr(a, name, v))),
        Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(subst_expr(a, name, v)), Box::new(subst_expr(b, name, v))),
    }
}

fn subst(c: &Cond, name: &str, v: i64) -> Cond {
    let s = |c: &Cond| Box::new(subst(c, name, v));
    match c {
        Cond::Lit(_) => c.clone(),
        Cond::Cmp(r, a, b) => Cond::Cmp(*r, subst_expr(a, name, v), subst_expr(b, name, v)),
        Cond::Not(a) => Cond::Not(s(a)),
        Cond::And(a, b) => Cond::And(s(a), s(b)),
        Cond::Or(a, b) => Cond::Or(s(a), s(b)),
        Cond::Implies(a, b) => Cond::Implies(s(a), s(b)),
        Cond::ForAll { index, lo, hi, body } => Cond::ForAll {
            index: index.clone(),
            lo: subst_expr(lo, name, v),
            hi: subst_expr(hi, name, v),
            // An inner quantifier over the same name shadows the outer one.
            body: if index == name { body.clone() } else { s(body) },
        },
    }
}

fn conj(a: Cond, b: Cond) -> Cond {
    match (a, b) {
        (Cond::Lit(true), x) | (x, Cond::Lit(true)) => x,
        (a, b) => Cond::And(Box::new(a), Box::new(b)),
    }
}

/// Replaces every quantifier by the conjunction of its instances. Bounds
/// must be constant once outer indices are fixed; an empty range gives
/// `true`.
pub fn expand_quantifiers(c: &Cond) -> Result<Cond, PathError> {
    let e = |c: &Cond| expand_quantifiers(c).map(Box::new);
    Ok(match c {
        Cond::Lit(_) | Cond::Cmp(..) => c.clone(),
        Cond::Not(a) => Cond::Not(e(a)?),
        Cond::And(a, b) => Cond::And(e(a)?, e(b)?),
        Cond::Or(a, b) => Cond::Or(e(a)?, e(b)?),
        Cond::Implies(a, b) => Cond::Implies(e(a)?, e(b)?),
        Cond::ForAll { index, lo, hi, body } => {
            let lo = constant(lo).ok_or(PathError::UnboundedQuantifier)?;
            let hi = constant(hi).ok_or(PathError::UnboundedQuantifier)?;
            let mut out = Cond::Lit(true);
            for k in lo..hi {
                out = conj(out, expand_quantifiers(&subst(body, index, k))?);
            }
            out
        }
    })
}

/// Negation normal form of a quantifier-free condition, negated when `neg`
/// is set: no `Not` or `Implies` remains and comparisons absorb negations.
pub fn nnf(c: &Cond, neg: bool) -> Cond {
    let b = |c: &Cond, n: bool| Box::new(nnf(c, n));
    match c {
        Cond::Lit(v) => Cond::Lit(*v != neg),
        Cond::Cmp(r, x, y) => Cond::Cmp(if neg { r.negate() } else { *r }, x.clone(), y.clone()),
        Cond::Not(a) => nnf(a, !neg),
        Cond::And(x, y) if neg => Cond::Or(b(x, true), b(y, true)),
        Cond::And(x, y) => Cond::And(b(x, false), b(y, false)),
        Cond::Or(x, y) if neg => Cond::And(b(x, true), b(y, true)),
        Cond::Or(x, y) => Cond::Or(b(x, false), b(y, false)),
        Cond::Implies(x, y) if neg => Cond::And(b(x, false), b(y, true)),
        Cond::Implies(x, y) => Cond::Or(b(x, true), b(y, false)),
        Cond::ForAll { .. } => unreachable!("quantifiers are expanded first"),
    }
}

/// The condition forcing the branch opposite to `taken`.
pub fn flip(cond: &Cond, taken: Branch) -> Cond {
    nnf(cond, taken == Branch::Then)
}
