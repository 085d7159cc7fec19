//! Rewrites atoms into expanded polynomial form so that cancelling terms
//! such as `r - r` disappear before interval reasoning sees them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Formula, Rel, Term, VarId};

/// Monomial (sorted variable list) to coefficient.
pub(super) type Poly = BTreeMap<Vec<u32>, i128>;

pub(super) const LIMIT: i128 = i64::MAX as i128;

pub(super) fn add_into(p: &mut Poly, m: Vec<u32>, c: i128) -> Option<()> {
    let e = p.entry(m).or_insert(0);
    *e = e.checked_add(c)?;
    if e.abs() > LIMIT {
        return None;
    }
    Some(())
}

pub(super) fn poly(t: &Term) -> Option<Poly> {
    let mut p = Poly::new();
    match t {
        Term::Const(c) => add_into(&mut p, Vec::new(), *c as i128)?,
        Term::Var(v) => add_into(&mut p, alloc::vec![v.0], 1)?,
        Term::Neg(a) => {
            for (m, c) in poly(a)? {
                add_into(&mut p, m, -c)?;
            }
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            let sign = if matches!(t, Term::Sub(..)) { -1 } else { 1 };
            for (m, c) in poly(a)? {
                add_into(&mut p, m, c)?;
            }
            for (m, c) in poly(b)? {
                add_into(&mut p, m, sign * c)?;
            }
        }
        Term::Mul(a, b) => {
            let (pa, pb) = (poly(a)?, poly(b)?);
            for (ma, ca) in &pa {
                for (mb, cb) in &pb {
                    let mut m: Vec<u32> = ma.iter().chain(mb).copied().collect();
                    m.sort_unstable();
                    add_into(&mut p, m, ca.checked_mul(*cb)?)?;
                }
            }
        }
    }
    p.retain(|_, c| *c != 0);
    Some(p)
}

/// Repeated variables are paired into squares first so that interval
/// reasoning knows they are non-negative.
fn monomial(m: &[u32]) -> Term {
    let mut squares = Vec::new();
    let mut rest = Vec::new();
    let mut i = 0;
    while i < m.len() {
        if i + 1 < m.len() && m[i] == m[i + 1] {
            let x = Term::Var(VarId(m[i]));
            squares.push(Term::mul(x.clone(), x));
            i += 2;
        } else {
            rest.push(Term::Var(VarId(m[i])));
            i += 1;
        }
    }
    let mut it = squares.into_iter().chain(rest);
    let first = it.next().expect("non-constant monomial");
    it.fold(first, Term::mul)
}

pub(super) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(super) fn rebuild(p: &Poly) -> Term {
    let mut out: Option<Term> = None;
    for (m, c) in p {
        let base = monomial(m);
        let (neg, t) = match *c {
            1 => (false, base),
            -1 => (true, base),
            c if c < 0 => (true, Term::mul(Term::Const((-c) as i64), base)),
            c => (false, Term::mul(Term::Const(c as i64), base)),
        };
        out = Some(match (out, neg) {
            (None, false) => t,
            (None, true) => Term::neg(t),
            (Some(acc), false) => Term::add(acc, t),
            (Some(acc), true) => Term::sub(acc, t),
        });
    }
    out.unwrap_or(Term::Const(0))
}

pub(super) fn atom(r: Rel, a: &Term, b: &Term) -> Formula {
    let original = || Formula::Atom(r, a.clone(), b.clone());
    let (Some(pa), Some(mut pb)) = (poly(a), poly(b)) else {
        return original();
    };
    // Move every non-constant monomial to the left.
    let mut left = pa;
    let k = pb.remove(&Vec::new()).unwrap_or(0);
    for (m, c) in pb {
        if add_into(&mut left, m, -c).is_none() {
            return original();
        }
    }
    let k = match left.remove(&Vec::new()) {
        Some(c) => k - c,
        None => k,
    };
    left.retain(|_, c| *c != 0);
    if k.abs() > LIMIT {
        return original();
    }
    if left.is_empty() {
        return if r.holds(0, k) { Formula::True } else { Formula::False };
    }
    let (r, k) = match left.values().fold(0, |g, c| gcd(g, *c)) {
        g if g > 1 => {
            for c in left.values_mut() {
                *c /= g;
            }
            match r {
                Rel::Eq if k % g != 0 => return Formula::False,
                Rel::Ne if k % g != 0 => return Formula::True,
                Rel::Eq | Rel::Ne => (r, k / g),
                Rel::Le => (r, k.div_euclid(g)),
                Rel::Gt => (r, k.div_euclid(g)),
                Rel::Lt | Rel::Ge => (r, -(-k).div_euclid(g)),
            }
        }
        _ => (r, k),
    };
    Formula::Atom(r, rebuild(&left), Term::Const(k as i64))
}

fn subst_term(t: &Term, fixed: &BTreeMap<u32, i64>) -> Term {
    replace(t, &|v| fixed.get(&v).map(|c| Term::Const(*c)))
}

pub(super) fn replace(t: &Term, f: &dyn Fn(u32) -> Option<Term>) -> Term {
    match t {
        Term::Const(_) => t.clone(),
        Term::Var(v) => f(v.0).unwrap_or_else(|| t.clone()),
        Term::Neg(a) => Term::neg(replace(a, f)),
        Term::Add(a, b) => Term::add(replace(a, f), replace(b, f)),
        Term::Sub(a, b) => Term::sub(replace(a, f), replace(b, f)),
        Term::Mul(a, b) => Term::mul(replace(a, f), replace(b, f)),
    }
}

fn substitute(f: &Formula, fixed: &BTreeMap<u32, i64>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(r, a, b) => expand(*r, &subst_term(a, fixed), &subst_term(b, fixed)),
        Formula::And(ps) => Formula::and(ps.iter().map(|p| substitute(p, fixed)).collect()),
        Formula::Or(ps) => Formula::or(ps.iter().map(|p| substitute(p, fixed)).collect()),
    }
}

fn unit(f: &Formula) -> Option<(u32, i64)> {
    match f {
        Formula::Atom(Rel::Eq, Term::Var(v), Term::Const(c)) => Some((v.0, *c)),
        Formula::Atom(Rel::Eq, Term::Neg(x), Term::Const(c)) => match **x {
            Term::Var(v) => Some((v.0, c.checked_neg()?)),
            _ => None,
        },
        _ => None,
    }
}

/// Normalizes `hard` and `soft`, then repeatedly replaces variables fixed by
/// a hard `x == c` with `c` everywhere else. The unit equalities are kept.
pub(crate) fn simplify(hard: &[Formula], soft: &[Formula]) -> (Vec<Formula>, Vec<Formula>) {
    let mut hard: Vec<Formula> = hard.iter().map(normalize).collect();
    let mut soft: Vec<Formula> = soft.iter().map(normalize).collect();
    let mut fixed = BTreeMap::new();
    loop {
        let mut fresh = BTreeMap::new();
        for f in &hard {
            if let Some((v, c)) = unit(f) {
                if !fixed.contains_key(&v) {
                    fresh.entry(v).or_insert(c);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        fixed.extend(fresh.iter().map(|(v, c)| (*v, *c)));
        hard = hard.iter().map(|f| substitute(f, &fresh)).collect();
        soft = soft.iter().map(|f| substitute(f, &fresh)).collect();
    }
    hard.extend(fixed.iter().map(|(v, c)| Formula::eq(Term::Var(VarId(*v)), Term::Const(*c))));
    (hard, soft)
}

fn is_sum(t: &Term) -> bool {
    match t {
        Term::Add(..) | Term::Sub(..) => !t.is_const(),
        Term::Neg(a) => is_sum(a),
        _ => false,
    }
}

/// Has a product of two non-constant factors, one of them a sum.
fn factored(t: &Term) -> bool {
    match t {
        Term::Const(_) | Term::Var(_) => false,
        Term::Neg(a) => factored(a),
        Term::Add(a, b) | Term::Sub(a, b) => factored(a) || factored(b),
        Term::Mul(a, b) => {
            (!a.is_const() && !b.is_const() && (is_sum(a) || is_sum(b))) || factored(a) || factored(b)
        }
    }
}

/// [`atom`], keeping a factored original next to its expansion since
/// interval reasoning is often tighter on the factored form.
pub(super) fn expand(r: Rel, a: &Term, b: &Term) -> Formula {
    let n = atom(r, a, b);
    if matches!(n, Formula::Atom(..)) && (factored(a) || factored(b)) {
        Formula::and(alloc::vec![n, Formula::Atom(r, a.clone(), b.clone())])
    } else {
        n
    }
}

/// Equivalent formula with every atom in the form `poly REL constant`.
pub(crate) fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(r, a, b) => expand(*r, a, b),
        Formula::And(ps) => Formula::and(ps.iter().map(normalize).collect()),
        Formula::Or(ps) => Formula::or(ps.iter().map(normalize).collect()),
    }
}
