use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::solver::Rel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Comparison operators share the solver's relation type.
pub type CmpOp = Rel;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(i64),
    Var(String),
    /// `a[e]`
    Read(String, Box<IntExpr>),
    /// `a.length`, replaced by a literal during checking.
    Length(String),
    Neg(Box<IntExpr>),
    Bin(ArithOp, Box<IntExpr>, Box<IntExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Lit(bool),
    Cmp(CmpOp, IntExpr, IntExpr),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    /// `index` ranges over `[lo, hi)`. Only allowed in specifications.
    ForAll {
        index: String,
        lo: IntExpr,
        hi: IntExpr,
        body: Box<BoolExpr>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    /// Length is `None` until resolved.
    Array(Option<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: String,
    pub ty: Type,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LValue {
    Var(String),
    Cell(String, IntExpr),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Cell(n, _) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub line: u32,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StmtKind {
    /// `declares` marks an initializing declaration such as `int k = 0;`.
    Assign {
        target: LValue,
        value: IntExpr,
        declares: bool,
    },
    If {
        cond: BoolExpr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        cond: BoolExpr,
        body: Vec<Stmt>,
    },
    Return(IntExpr),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceProgram {
    pub name: String,
    pub params: Vec<Decl>,
    pub locals: Vec<Decl>,
    pub body: Vec<Stmt>,
    pub precondition: Option<BoolExpr>,
    pub postcondition: BoolExpr,
    pub returns_value: bool,
}

/// Name bound to the returned value in specifications.
pub const RESULT: &str = "\\result";
