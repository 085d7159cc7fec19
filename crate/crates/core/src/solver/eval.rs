//! Direct evaluation of terms and formulas on a full assignment.
//!
//! Kept separate from the propagation code so it can serve as an
//! independent check of solver output.

use super::{Assignment, Csp, Formula, Term};

/// `None` on arithmetic overflow.
pub fn eval_term(t: &Term, values: &[i64]) -> Option<i128> {
    match t {
        Term::Const(c) => Some(*c as i128),
        Term::Var(v) => values.get(v.index()).map(|x| *x as i128),
        Term::Neg(a) => eval_term(a, values)?.checked_neg(),
        Term::Add(a, b) => eval_term(a, values)?.checked_add(eval_term(b, values)?),
        Term::Sub(a, b) => eval_term(a, values)?.checked_sub(eval_term(b, values)?),
        Term::Mul(a, b) => eval_term(a, values)?.checked_mul(eval_term(b, values)?),
    }
}

/// `None` on arithmetic overflow.
pub fn eval_formula(f: &Formula, values: &[i64]) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Atom(r, a, b) => Some(r.holds(eval_term(a, values)?, eval_term(b, values)?)),
        Formula::And(ps) => {
            for p in ps {
                if !eval_formula(p, values)? {
                    return Some(false);
                }
            }
            Some(true)
        }
        Formula::Or(ps) => {
            for p in ps {
                if eval_formula(p, values)? {
                    return Some(true);
                }
            }
            Some(false)
        }
    }
}

/// Whether `a` satisfies every part of `csp`, domains included.
pub fn satisfies(csp: &Csp, a: &Assignment) -> bool {
    if a.values.len() != csp.vars.len() || a.indicators.len() != csp.indicators.len() {
        return false;
    }
    if csp.vars.ids().any(|v| !csp.vars.domain(v).contains(a.value(v))) {
        return false;
    }
    let holds = |f: &Formula| eval_formula(f, &a.values) == Some(true);
    if !csp.hard.iter().all(holds) {
        return false;
    }
    let guarded = csp.indicators.iter().zip(&a.indicators).all(|(f, y)| !*y || holds(f));
    if !guarded {
        return false;
    }
    if let Some(k) = csp.at_most {
        if a.indicators.iter().filter(|y| !**y).count() > k {
            return false;
        }
    }
    csp.clauses
        .iter()
        .all(|c| c.0.iter().any(|i| a.indicators.get(*i) == Some(&true)))
}
