use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::frontend::ArithOp;
use crate::solver::Rel;
use crate::LocRef;

/// A program variable at a given DSA version. Versions are all 0 before
/// renaming.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub name: String,
    pub version: u32,
}

impl VarRef {
    pub fn new(name: &str, version: u32) -> Self {
        VarRef { name: String::from(name), version }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.name, self.version)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i64),
    Var(VarRef),
    /// Cell of an array version.
    Read(VarRef, Box<Expr>),
    /// Quantifier-bound index.
    Bound(String),
    Neg(Box<Expr>),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    Lit(bool),
    Cmp(Rel, Expr, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Implies(Box<Cond>, Box<Cond>),
    /// `index` ranges over `[lo, hi)`.
    ForAll {
        index: String,
        lo: Expr,
        hi: Expr,
        body: Box<Cond>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Assign {
    Scalar {
        target: VarRef,
        value: Expr,
        loc: LocRef,
    },
    /// `array_to[index] = value`, every other cell carried over from
    /// `array_from`.
    Store {
        array: String,
        from: u32,
        to: u32,
        index: Expr,
        value: Expr,
        loc: LocRef,
    },
    /// Version reconciliation inserted at joins; has no source location.
    Copy {
        name: String,
        from: u32,
        to: u32,
        array: bool,
    },
}

impl Assign {
    pub fn loc(&self) -> Option<&LocRef> {
        match self {
            Assign::Scalar { loc, .. } | Assign::Store { loc, .. } => Some(loc),
            Assign::Copy { .. } => None,
        }
    }

    pub(crate) fn loc_mut(&mut self) -> Option<&mut LocRef> {
        match self {
            Assign::Scalar { loc, .. } | Assign::Store { loc, .. } => Some(loc),
            Assign::Copy { .. } => None,
        }
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(ArithOp::Add | ArithOp::Sub, ..) => 1,
        Expr::Bin(ArithOp::Mul, ..) => 2,
        _ => 3,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Read(a, i) => write!(f, "{a}[{i}]"),
            Expr::Bound(n) => f.write_str(n),
            Expr::Neg(a) if prec(a) < 3 => write!(f, "-({a})"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Bin(op, a, b) => {
                let p = prec(self);
                if prec(a) < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if prec(b) <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Lit(v) => write!(f, "{v}"),
            Cond::Cmp(r, a, b) => write!(f, "{a} {} {b}", r.symbol()),
            Cond::Not(a) => write!(f, "!({a})"),
            Cond::And(a, b) => write!(f, "({a} && {b})"),
            Cond::Or(a, b) => write!(f, "({a} || {b})"),
            Cond::Implies(a, b) => write!(f, "({a} ==> {b})"),
            Cond::ForAll { index, lo, hi, body } => write!(f, "(forall {index} in [{lo}, {hi}): {body})"),
        }
    }
}

impl fmt::Display for Assign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assign::Scalar { target, value, .. } => write!(f, "{target} = {value}"),
            Assign::Store { array, to, index, value, .. } => write!(f, "{array}_{to}[{index}] = {value}"),
            Assign::Copy { name, from, to, .. } => write!(f, "{name}_{to} = {name}_{from}"),
        }
    }
}
