use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use super::{VarId, VarTable};

/// Comparison relation of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn negate(self) -> Rel {
        match self {
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Gt => Rel::Le,
            Rel::Ge => Rel::Lt,
        }
    }

    pub fn holds(self, a: i128, b: i128) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "==",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(i64),
    Var(VarId),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(v: VarId) -> Term {
        Term::Var(v)
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn is_const(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::Neg(a) => a.is_const(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.is_const() && b.is_const(),
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => false,
            Term::Neg(a) => a.is_nonlinear(),
            Term::Add(a, b) | Term::Sub(a, b) => a.is_nonlinear() || b.is_nonlinear(),
            Term::Mul(a, b) => {
                (!a.is_const() && !b.is_const()) || a.is_nonlinear() || b.is_nonlinear()
            }
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Neg(a) => a.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn display<'a>(&'a self, names: &'a VarTable) -> impl fmt::Display + 'a {
        TermDisplay { term: self, names, top: true }
    }
}

fn push_new(out: &mut Vec<Formula>, f: Formula) {
    if !out.contains(&f) {
        out.push(f);
    }
}

/// Formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Rel, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom(rel: Rel, a: Term, b: Term) -> Formula {
        Formula::Atom(rel, a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Rel::Eq, a, b)
    }

    /// Conjunction, flattening nested conjunctions and dropping `True`.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => inner.into_iter().for_each(|p| push_new(&mut out, p)),
                other => push_new(&mut out, other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction, flattening nested disjunctions and dropping `False`.
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => inner.into_iter().for_each(|p| push_new(&mut out, p)),
                other => push_new(&mut out, other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// Negation, kept in NNF.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(r, a, b) => Formula::Atom(r.negate(), a.clone(), b.clone()),
            Formula::And(ps) => Formula::or(ps.iter().map(Formula::negate).collect()),
            Formula::Or(ps) => Formula::and(ps.iter().map(Formula::negate).collect()),
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(_, a, b) => a.is_nonlinear() || b.is_nonlinear(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().any(Formula::is_nonlinear),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::And(ps) | Formula::Or(ps) => {
                for p in ps {
                    p.collect_vars(out);
                }
            }
        }
    }

    pub fn display<'a>(&'a self, names: &'a VarTable) -> impl fmt::Display + 'a {
        FormulaDisplay { formula: self, names }
    }
}

struct TermDisplay<'a> {
    term: &'a Term,
    names: &'a VarTable,
    top: bool,
}

impl<'a> fmt::Display for TermDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |t: &'a Term| TermDisplay { term: t, names: self.names, top: false };
        let (op, a, b) = match self.term {
            Term::Const(c) => return write!(f, "{c}"),
            Term::Var(v) => return f.write_str(self.names.name(*v)),
            Term::Neg(a) => return write!(f, "-{}", sub(a)),
            Term::Add(a, b) => ("+", a, b),
            Term::Sub(a, b) => ("-", a, b),
            Term::Mul(a, b) => ("*", a, b),
        };
        if self.top {
            write!(f, "{} {op} {}", sub(a), sub(b))
        } else {
            write!(f, "({} {op} {})", sub(a), sub(b))
        }
    }
}

struct FormulaDisplay<'a> {
    formula: &'a Formula,
    names: &'a VarTable,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ps: &[Formula], sep: &str| {
            f.write_str("(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{}", p.display(self.names))?;
            }
            f.write_str(")")
        };
        match self.formula {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(r, a, b) => {
                write!(f, "{} {} {}", a.display(self.names), r.symbol(), b.display(self.names))
            }
            Formula::And(ps) => join(f, ps, " && "),
            Formula::Or(ps) => join(f, ps, " || "),
        }
    }
}
