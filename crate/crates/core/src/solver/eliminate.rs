//! Presolve for problems without open indicators: a variable defined by an
//! equality `x + rest == k` (or `-x + rest == k`) is replaced by its
//! definition everywhere, and its domain becomes a constraint on the
//! definition.

use alloc::vec::Vec;

use super::normalize::{atom, expand, poly, rebuild, replace, Poly};
use super::{Formula, Rel, Term};

/// Definitions larger than this are not substituted.
const MAX_TERMS: usize = 64;

pub(crate) struct Elimination {
    pub formulas: Vec<Formula>,
    /// `(x, p)` meaning `x = p`, in elimination order.
    pub defs: Vec<(u32, Poly)>,
}

fn to_term(p: &Poly) -> Term {
    let k = p.get(&Vec::new()).copied().unwrap_or(0);
    let mut rest = p.clone();
    rest.remove(&Vec::new());
    match (rest.is_empty(), k) {
        (true, k) => Term::Const(k as i64),
        (false, 0) => rebuild(&rest),
        (false, k) => Term::add(rebuild(&rest), Term::Const(k as i64)),
    }
}

fn flatten(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(ps) => ps.into_iter().for_each(|p| flatten(p, out)),
        Formula::True => {}
        f if out.contains(&f) => {}
        f => out.push(f),
    }
}

fn atom_poly(a: &Term, b: &Term) -> Option<Poly> {
    let mut p = poly(a)?;
    for (m, c) in poly(b)? {
        let e = p.entry(m).or_insert(0);
        *e = e.checked_sub(c)?;
    }
    p.retain(|_, c| *c != 0);
    Some(p)
}

/// Variables that `f` defines, with their definitions.
fn definitions(f: &Formula) -> Vec<(u32, Poly)> {
    let Formula::Atom(Rel::Eq, a, b) = f else {
        return Vec::new();
    };
    let Some(p) = atom_poly(a, b) else {
        return Vec::new();
    };
    if p.len() > MAX_TERMS + 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (m, c) in &p {
        if m.len() != 1 || c.abs() != 1 || p.keys().filter(|n| n.contains(&m[0])).count() != 1 {
            continue;
        }
        let mut def = p.clone();
        def.remove(m);
        // c*x + def == 0, c = +-1
        for v in def.values_mut() {
            *v *= -c;
        }
        out.push((m[0], def));
    }
    out
}

/// `x` occurs in a product inside `f`, or `f` cannot be expanded.
fn in_product(f: &Formula, x: u32) -> bool {
    match f {
        Formula::True | Formula::False => false,
        Formula::Atom(_, a, b) => {
            atom_poly(a, b).is_none_or(|p| p.keys().any(|m| m.len() > 1 && m.contains(&x)))
        }
        Formula::And(ps) | Formula::Or(ps) => ps.iter().any(|p| in_product(p, x)),
    }
}

/// A definition with several terms is only substituted where it stays
/// linear, so that squares are not expanded into cross products.
fn next_definition(fs: &[Formula]) -> Option<(usize, (u32, Poly))> {
    fs.iter().enumerate().find_map(|(i, f)| {
        definitions(f)
            .into_iter()
            .find(|(x, def)| {
                def.keys().filter(|m| !m.is_empty()).count() <= 1
                    || fs.iter().enumerate().all(|(j, g)| j == i || !in_product(g, *x))
            })
            .map(|d| (i, d))
    })
}

fn subst(f: &Formula, x: u32, t: &Term) -> Formula {
    let r = |v: u32| (v == x).then(|| t.clone());
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(rel, a, b) => expand(*rel, &replace(a, &r), &replace(b, &r)),
        Formula::And(ps) => Formula::and(ps.iter().map(|p| subst(p, x, t)).collect()),
        Formula::Or(ps) => Formula::or(ps.iter().map(|p| subst(p, x, t)).collect()),
    }
}

/// `bounds[x]` is the current domain of variable `x`.
pub(crate) fn eliminate(formulas: Vec<Formula>, bounds: &[(i64, i64)]) -> Elimination {
    let mut fs = Vec::new();
    formulas.into_iter().for_each(|f| flatten(f, &mut fs));
    let mut defs = Vec::new();
    while let Some((i, (x, def))) = next_definition(&fs) {
        fs.swap_remove(i);
        let t = to_term(&def);
        let (lo, hi) = bounds[x as usize];
        let mut next = Vec::with_capacity(fs.len() + 2);
        for f in fs.iter().map(|f| subst(f, x, &t)) {
            flatten(f, &mut next);
        }
        next.push(atom(Rel::Ge, &t, &Term::Const(lo)));
        next.push(atom(Rel::Le, &t, &Term::Const(hi)));
        next.retain(|f| *f != Formula::True);
        fs = next;
        defs.push((x, def));
        if fs.contains(&Formula::False) {
            break;
        }
    }
    Elimination { formulas: fs, defs }
}

/// Value of a definition; `None` on overflow.
pub(crate) fn eval(p: &Poly, values: &[i64]) -> Option<i64> {
    let mut sum: i128 = 0;
    for (m, c) in p {
        let mut t = *c;
        for v in m {
            t = t.checked_mul(values[*v as usize] as i128)?;
        }
        sum = sum.checked_add(t)?;
    }
    i64::try_from(sum).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::VarId;

    fn v(i: u32) -> Term {
        Term::Var(VarId(i))
    }

    #[test]
    fn definitions_evaluate_back() {
        use crate::solver::{satisfies, solve, Csp, Domain, SolveResult, VarTable};
        let mut vars = VarTable::new();
        let x = Term::Var(vars.declare("x", Domain::new(-100, 100)));
        let y = Term::Var(vars.declare("y", Domain::new(-100, 100)));
        let fs = alloc::vec![
            Formula::eq(y.clone(), Term::add(x.clone(), Term::Const(1))),
            Formula::eq(Term::add(x, y), Term::Const(13)),
        ];
        let e = eliminate(fs.clone(), &[(-100, 100), (-100, 100)]);
        assert!(!e.defs.is_empty());
        let csp = Csp::new(vars, fs);
        let SolveResult::Sat(a) = solve(&csp).unwrap() else { panic!("x = 6, y = 7 is a solution") };
        assert_eq!(a.values, [6, 7]);
        assert!(satisfies(&csp, &a));
    }

    #[test]
    fn nonlinear_occurrence_blocks_definition() {
        let f = Formula::eq(Term::add(v(0), Term::mul(v(0), v(1))), Term::Const(3));
        assert!(definitions(&f).is_empty());
        let e = eliminate(alloc::vec![f.clone()], &[(-9, 9), (-9, 9)]);
        assert!(e.defs.is_empty());
    }

    #[test]
    fn squares_are_not_expanded() {
        // a = b - r must not be substituted into a * a.
        let fs = alloc::vec![
            Formula::eq(v(0), Term::sub(v(1), v(2))),
            Formula::atom(Rel::Lt, Term::add(v(0), Term::mul(Term::Const(3), Term::mul(v(0), v(0)))), Term::Const(-2)),
        ];
        let e = eliminate(fs, &[(-99, 99); 3]);
        assert_ne!(e.defs[0].0, 0);
    }

    #[test]
    fn wide_chain_is_refuted_quickly() {
        use crate::solver::{solve, Csp, Domain, VarTable};
        let mut vars = VarTable::new();
        let x = Term::Var(vars.declare("x", Domain::default()));
        let y = Term::Var(vars.declare("y", Domain::default()));
        let hard = alloc::vec![
            Formula::eq(y.clone(), Term::add(x.clone(), Term::Const(1))),
            Formula::eq(Term::add(x, y), Term::Const(12)),
        ];
        assert!(!solve(&Csp::new(vars, hard)).unwrap().is_sat());
    }
}
