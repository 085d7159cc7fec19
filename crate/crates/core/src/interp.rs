//! Reference interpreter over the source AST.
//!
//! Runs a program directly, without going through the CFG, so that it can
//! serve as an oracle for path propagation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::frontend::{ArithOp, BoolExpr, IntExpr, LValue, Stmt, StmtKind, Type, ValidatedProgram, RESULT};
use crate::input::{Counterexample, InputError, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    Input(InputError),
    IndexOutOfBounds { line: u32, array: String, index: i64 },
    Overflow { line: u32 },
    /// A loop wanted more iterations than allowed.
    TripLimit { line: u32 },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(e) => write!(f, "{e}"),
            RunError::IndexOutOfBounds { line, array, index } => {
                write!(f, "line {line}: index {index} out of bounds for `{array}`")
            }
            RunError::Overflow { line } => write!(f, "line {line}: integer overflow"),
            RunError::TripLimit { line } => write!(f, "line {line}: loop exceeds the iteration limit"),
        }
    }
}

impl core::error::Error for RunError {}

/// Final state of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    /// Every assigned variable, `\result` included when returned.
    pub store: BTreeMap<String, Value>,
    pub pre_holds: bool,
    pub post_holds: bool,
}

struct Machine {
    store: BTreeMap<String, Value>,
    trip_limit: Option<u32>,
}

/// Executes `program` on `input`; loops may run at most `trip_limit` times.
pub fn run(program: &ValidatedProgram, input: &Counterexample, trip_limit: Option<u32>) -> Result<Execution, RunError> {
    let input = input.conform(program).map_err(RunError::Input)?;
    let p = program.program();
    let mut m = Machine { store: input.bindings.clone(), trip_limit };
    let pre_holds = match &p.precondition {
        Some(pre) => m.cond(pre, 0)?,
        None => true,
    };
    m.stmts(&p.body)?;
    let post_holds = m.cond(&p.postcondition, 0)?;
    // Local arrays are rejected by the checker, so every array is a parameter.
    debug_assert!(p.locals.iter().all(|d| d.ty == Type::Int));
    Ok(Execution { store: m.store, pre_holds, post_holds })
}

impl Machine {
    fn stmts(&mut self, body: &[Stmt]) -> Result<(), RunError> {
        for s in body {
            match &s.kind {
                StmtKind::Assign { target, value, .. } => {
                    let v = self.int(value, s.line)?;
                    match target {
                        LValue::Var(n) => {
                            self.store.insert(n.clone(), Value::Int(v));
                        }
                        LValue::Cell(a, i) => {
                            let idx = self.int(i, s.line)?;
                            let cell = self.cell(a, idx, s.line)?;
                            if let Some(Value::Array(cells)) = self.store.get_mut(a) {
                                cells[cell] = v;
                            }
                        }
                    }
                }
                StmtKind::If { cond, then_branch, else_branch } => {
                    if self.cond(cond, s.line)? {
                        self.stmts(then_branch)?;
                    } else {
                        self.stmts(else_branch)?;
                    }
                }
                StmtKind::While { cond, body } => {
                    let mut trips = 0u32;
                    while self.cond(cond, s.line)? {
                        if self.trip_limit.is_some_and(|b| trips >= b) {
                            return Err(RunError::TripLimit { line: s.line });
                        }
                        trips += 1;
                        self.stmts(body)?;
                    }
                }
                StmtKind::Return(e) => {
                    let v = self.int(e, s.line)?;
                    self.store.insert(String::from(RESULT), Value::Int(v));
                }
            }
        }
        Ok(())
    }

    fn cell(&self, a: &str, idx: i64, line: u32) -> Result<usize, RunError> {
        match self.store.get(a) {
            Some(Value::Array(cells)) if idx >= 0 && (idx as usize) < cells.len() => Ok(idx as usize),
            _ => Err(RunError::IndexOutOfBounds { line, array: String::from(a), index: idx }),
        }
    }

    fn int(&self, e: &IntExpr, line: u32) -> Result<i64, RunError> {
        let ovf = RunError::Overflow { line };
        Ok(match e {
            IntExpr::Lit(v) => *v,
            IntExpr::Var(n) => match self.store.get(n) {
                Some(Value::Int(v)) => *v,
                _ => unreachable!("checked program reads unassigned `{n}`"),
            },
            IntExpr::Read(a, i) => {
                let idx = self.int(i, line)?;
                let c = self.cell(a, idx, line)?;
                match &self.store[a] {
                    Value::Array(cells) => cells[c],
                    Value::Int(_) => unreachable!(),
                }
            }
            IntExpr::Length(a) => match self.store.get(a) {
                Some(Value::Array(cells)) => cells.len() as i64,
                _ => unreachable!(),
            },
            IntExpr::Neg(a) => self.int(a, line)?.checked_neg().ok_or(ovf)?,
            IntExpr::Bin(op, a, b) => {
                let (x, y) = (self.int(a, line)?, self.int(b, line)?);
                match op {
                    ArithOp::Add => x.checked_add(y),
                    ArithOp::Sub => x.checked_sub(y),
                    ArithOp::Mul => x.checked_mul(y),
                }
                .ok_or(ovf)?
            }
        })
    }

    fn cond(&mut self, b: &BoolExpr, line: u32) -> Result<bool, RunError> {
        Ok(match b {
            BoolExpr::Lit(v) => *v,
            BoolExpr::Cmp(r, x, y) => r.holds(self.int(x, line)? as i128, self.int(y, line)? as i128),
            BoolExpr::Not(a) => !self.cond(a, line)?,
            BoolExpr::And(a, c) => self.cond(a, line)? && self.cond(c, line)?,
            BoolExpr::Or(a, c) => self.cond(a, line)? || self.cond(c, line)?,
            BoolExpr::Implies(a, c) => !self.cond(a, line)? || self.cond(c, line)?,
            BoolExpr::ForAll { index, lo, hi, body } => {
                let (lo, hi) = (self.int(lo, line)?, self.int(hi, line)?);
                let saved = self.store.remove(index);
                let mut all = true;
                for k in lo..hi {
                    self.store.insert(index.clone(), Value::Int(k));
                    if !self.cond(body, line)? {
                        all = false;
                        break;
                    }
                }
                self.store.remove(index);
                if let Some(v) = saved {
                    self.store.insert(index.clone(), v);
                }
                all
            }
        })
    }
}

/// Integers in `[lo, hi]` ordered by distance from zero, non-negative first.
pub fn scan_order(lo: i64, hi: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (lo..=hi).collect();
    v.sort_by_key(|x| (x.unsigned_abs(), *x < 0));
    v
}
