use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::{FrontendError, FrontendErrorKind, ValidatedProgram};
use crate::solver::Rel;

type Result<T> = core::result::Result<T, FrontendError>;

fn fail<T>(kind: FrontendErrorKind, line: u32) -> Result<T> {
    Err(FrontendError::new(kind, line, 0))
}

pub(crate) fn check(mut p: SourceProgram) -> Result<ValidatedProgram> {
    for d in &p.locals {
        if matches!(d.ty, Type::Array(_)) {
            return fail(FrontendErrorKind::LocalArray(d.name.clone()), d.line);
        }
    }
    let arrays = resolve_lengths(&mut p)?;
    check_return(&p)?;

    // `\result` in a method without `return` denotes a local named `result`.
    let has_return = matches!(p.body.last(), Some(Stmt { kind: StmtKind::Return(_), .. }));
    if !has_return {
        if p.locals.iter().any(|d| d.name == "result") {
            p.postcondition = rename_bool(&p.postcondition, RESULT, "result");
        } else if mentions_bool(&p.postcondition, RESULT) {
            return fail(FrontendErrorKind::UndeclaredVariable(RESULT.to_string()), 0);
        }
    }

    let lens = |e: &IntExpr| subst_length(e, &arrays);
    p.postcondition = map_bool(&p.postcondition, &lens);
    p.precondition = p.precondition.as_ref().map(|b| map_bool(b, &lens));
    p.body = p.body.iter().map(|s| map_stmt(s, &lens)).collect();

    let scalars: BTreeSet<String> = p
        .params
        .iter()
        .chain(&p.locals)
        .filter(|d| d.ty == Type::Int)
        .map(|d| d.name.clone())
        .collect();
    let names = Names { scalars: &scalars, arrays: &arrays };

    let mut lines = BTreeSet::new();
    check_stmts(&p.body, &names, &mut lines)?;

    let mut spec_scope = BTreeSet::new();
    if let Some(pre) = &p.precondition {
        names.bool_expr(pre, &mut spec_scope, true, 0)?;
    }
    if has_return {
        spec_scope.insert(RESULT.to_string());
    }
    names.bool_expr(&p.postcondition, &mut spec_scope, true, 0)?;

    let mut assigned: BTreeSet<String> = p.params.iter().map(|d| d.name.clone()).collect();
    assigned.extend(arrays.keys().cloned());
    if let Some(pre) = &p.precondition {
        reads_bool(pre, &assigned, &mut BTreeSet::new(), 0)?;
    }
    definite(&p.body, &mut assigned)?;
    reads_bool(&p.postcondition, &assigned, &mut BTreeSet::new(), 0)?;

    Ok(ValidatedProgram { program: p, arrays })
}

/// Lengths come from `int[n]` or from a precondition conjunct `a.length == n`.
fn resolve_lengths(p: &mut SourceProgram) -> Result<BTreeMap<String, usize>> {
    let mut from_pre = BTreeMap::new();
    if let Some(pre) = p.precondition.take() {
        let mut kept = Vec::new();
        for c in conjuncts(pre) {
            let fixed = match &c {
                BoolExpr::Cmp(Rel::Eq, IntExpr::Length(a), IntExpr::Lit(n))
                | BoolExpr::Cmp(Rel::Eq, IntExpr::Lit(n), IntExpr::Length(a))
                    if *n >= 0 =>
                {
                    Some((a.clone(), *n as usize))
                }
                _ => None,
            };
            match fixed {
                Some((a, n)) => {
                    if let Some(old) = from_pre.insert(a.clone(), n) {
                        if old != n {
                            return fail(FrontendErrorKind::TypeMismatch(alloc::format!("conflicting lengths for `{a}`")), 0);
                        }
                    }
                }
                None => kept.push(c),
            }
        }
        p.precondition = kept.into_iter().reduce(|a, b| BoolExpr::And(Box::new(a), Box::new(b)));
    }
    let mut arrays = BTreeMap::new();
    for d in &mut p.params {
        if let Type::Array(len) = d.ty {
            let n = match (len, from_pre.get(&d.name)) {
                (Some(a), Some(b)) if a != *b => {
                    return fail(FrontendErrorKind::TypeMismatch(alloc::format!("conflicting lengths for `{}`", d.name)), d.line)
                }
                (Some(a), _) => a,
                (None, Some(b)) => *b,
                (None, None) => return fail(FrontendErrorKind::ArrayLengthUnknown(d.name.clone()), d.line),
            };
            d.ty = Type::Array(Some(n));
            arrays.insert(d.name.clone(), n);
        }
    }
    if let Some(a) = from_pre.keys().find(|a| !arrays.contains_key(*a)) {
        return fail(FrontendErrorKind::UndeclaredVariable(a.clone()), 0);
    }
    Ok(arrays)
}

fn conjuncts(b: BoolExpr) -> Vec<BoolExpr> {
    match b {
        BoolExpr::And(a, c) => {
            let mut v = conjuncts(*a);
            v.extend(conjuncts(*c));
            v
        }
        other => alloc::vec![other],
    }
}

fn check_return(p: &SourceProgram) -> Result<()> {
    fn nested(stmts: &[Stmt]) -> Option<u32> {
        for s in stmts {
            match &s.kind {
                StmtKind::Return(_) => return Some(s.line),
                StmtKind::If { then_branch, else_branch, .. } => {
                    if let Some(l) = nested(then_branch).or_else(|| nested(else_branch)) {
                        return Some(l);
                    }
                }
                StmtKind::While { body, .. } => {
                    if let Some(l) = nested(body) {
                        return Some(l);
                    }
                }
                StmtKind::Assign { .. } => {}
            }
        }
        None
    }
    let n = p.body.len();
    if n > 0 {
        if let Some(l) = nested(&p.body[..n - 1]) {
            return fail(FrontendErrorKind::MisplacedReturn, l);
        }
        if let StmtKind::If { .. } | StmtKind::While { .. } = &p.body[n - 1].kind {
            if let Some(l) = nested(&p.body[n - 1..]) {
                return fail(FrontendErrorKind::MisplacedReturn, l);
            }
        }
        if let StmtKind::Return(_) = &p.body[n - 1].kind {
            if !p.returns_value {
                return fail(FrontendErrorKind::MisplacedReturn, p.body[n - 1].line);
            }
        }
    }
    Ok(())
}

struct Names<'a> {
    scalars: &'a BTreeSet<String>,
    arrays: &'a BTreeMap<String, usize>,
}

impl Names<'_> {
    fn int_expr(&self, e: &IntExpr, bound: &BTreeSet<String>, line: u32) -> Result<()> {
        match e {
            IntExpr::Lit(_) => Ok(()),
            IntExpr::Var(n) => {
                if self.scalars.contains(n) || bound.contains(n) {
                    Ok(())
                } else if self.arrays.contains_key(n) {
                    fail(FrontendErrorKind::TypeMismatch(alloc::format!("array `{n}` used as an integer")), line)
                } else {
                    fail(FrontendErrorKind::UndeclaredVariable(n.clone()), line)
                }
            }
            IntExpr::Read(a, _) | IntExpr::Length(a) if !self.arrays.contains_key(a) => {
                if self.scalars.contains(a) {
                    fail(FrontendErrorKind::TypeMismatch(alloc::format!("`{a}` is not an array")), line)
                } else {
                    fail(FrontendErrorKind::UndeclaredVariable(a.clone()), line)
                }
            }
            IntExpr::Read(_, i) => self.int_expr(i, bound, line),
            IntExpr::Length(_) => Ok(()),
            IntExpr::Neg(a) => self.int_expr(a, bound, line),
            IntExpr::Bin(_, a, b) => {
                self.int_expr(a, bound, line)?;
                self.int_expr(b, bound, line)
            }
        }
    }

    fn bool_expr(&self, b: &BoolExpr, bound: &mut BTreeSet<String>, spec: bool, line: u32) -> Result<()> {
        match b {
            BoolExpr::Lit(_) => Ok(()),
            BoolExpr::Cmp(_, x, y) => {
                self.int_expr(x, bound, line)?;
                self.int_expr(y, bound, line)
            }
            BoolExpr::Not(a) => self.bool_expr(a, bound, spec, line),
            BoolExpr::And(a, c) | BoolExpr::Or(a, c) | BoolExpr::Implies(a, c) => {
                self.bool_expr(a, bound, spec, line)?;
                self.bool_expr(c, bound, spec, line)
            }
            BoolExpr::ForAll { index, lo, hi, body } => {
                if !spec {
                    return fail(FrontendErrorKind::QuantifierInStatement, line);
                }
                if self.scalars.contains(index) || self.arrays.contains_key(index) || bound.contains(index) {
                    return fail(FrontendErrorKind::DuplicateDeclaration(index.clone()), line);
                }
                self.int_expr(lo, bound, line)?;
                self.int_expr(hi, bound, line)?;
                bound.insert(index.clone());
                let r = self.bool_expr(body, bound, spec, line);
                bound.remove(index);
                r
            }
        }
    }
}

fn check_stmts(stmts: &[Stmt], names: &Names<'_>, lines: &mut BTreeSet<u32>) -> Result<()> {
    let none = BTreeSet::new();
    for s in stmts {
        if !lines.insert(s.line) {
            return fail(FrontendErrorKind::SharedLine, s.line);
        }
        match &s.kind {
            StmtKind::Assign { target, value, .. } => {
                match target {
                    LValue::Var(n) => {
                        if names.arrays.contains_key(n) {
                            return fail(FrontendErrorKind::TypeMismatch(alloc::format!("cannot assign to array `{n}`")), s.line);
                        }
                        if !names.scalars.contains(n) {
                            return fail(FrontendErrorKind::UndeclaredVariable(n.clone()), s.line);
                        }
                    }
                    LValue::Cell(a, i) => {
                        names.int_expr(&IntExpr::Read(a.clone(), Box::new(i.clone())), &none, s.line)?;
                    }
                }
                names.int_expr(value, &none, s.line)?;
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                names.bool_expr(cond, &mut BTreeSet::new(), false, s.line)?;
                check_stmts(then_branch, names, lines)?;
                check_stmts(else_branch, names, lines)?;
            }
            StmtKind::While { cond, body } => {
                names.bool_expr(cond, &mut BTreeSet::new(), false, s.line)?;
                check_stmts(body, names, lines)?;
            }
            StmtKind::Return(e) => names.int_expr(e, &none, s.line)?,
        }
    }
    Ok(())
}

fn reads_int(e: &IntExpr, assigned: &BTreeSet<String>, bound: &BTreeSet<String>, line: u32) -> Result<()> {
    match e {
        IntExpr::Lit(_) | IntExpr::Length(_) => Ok(()),
        IntExpr::Var(n) => {
            if assigned.contains(n) || bound.contains(n) {
                Ok(())
            } else {
                fail(FrontendErrorKind::UninitializedRead(n.clone()), line)
            }
        }
        IntExpr::Read(_, i) | IntExpr::Neg(i) => reads_int(i, assigned, bound, line),
        IntExpr::Bin(_, a, b) => {
            reads_int(a, assigned, bound, line)?;
            reads_int(b, assigned, bound, line)
        }
    }
}

fn reads_bool(b: &BoolExpr, assigned: &BTreeSet<String>, bound: &mut BTreeSet<String>, line: u32) -> Result<()> {
    match b {
        BoolExpr::Lit(_) => Ok(()),
        BoolExpr::Cmp(_, x, y) => {
            reads_int(x, assigned, bound, line)?;
            reads_int(y, assigned, bound, line)
        }
        BoolExpr::Not(a) => reads_bool(a, assigned, bound, line),
        BoolExpr::And(a, c) | BoolExpr::Or(a, c) | BoolExpr::Implies(a, c) => {
            reads_bool(a, assigned, bound, line)?;
            reads_bool(c, assigned, bound, line)
        }
        BoolExpr::ForAll { index, lo, hi, body } => {
            reads_int(lo, assigned, bound, line)?;
            reads_int(hi, assigned, bound, line)?;
            bound.insert(index.clone());
            let r = reads_bool(body, assigned, bound, line);
            bound.remove(index);
            r
        }
    }
}

/// Conservative definite-assignment analysis.
fn definite(stmts: &[Stmt], assigned: &mut BTreeSet<String>) -> Result<()> {
    let none = BTreeSet::new();
    for s in stmts {
        match &s.kind {
            StmtKind::Assign { target, value, .. } => {
                reads_int(value, assigned, &none, s.line)?;
                match target {
                    LValue::Var(n) => {
                        assigned.insert(n.clone());
                    }
                    LValue::Cell(_, i) => reads_int(i, assigned, &none, s.line)?,
                }
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                reads_bool(cond, assigned, &mut BTreeSet::new(), s.line)?;
                let mut a = assigned.clone();
                let mut b = assigned.clone();
                definite(then_branch, &mut a)?;
                definite(else_branch, &mut b)?;
                *assigned = a.intersection(&b).cloned().collect();
            }
            StmtKind::While { cond, body } => {
                reads_bool(cond, assigned, &mut BTreeSet::new(), s.line)?;
                definite(body, &mut assigned.clone())?;
            }
            StmtKind::Return(e) => {
                reads_int(e, assigned, &none, s.line)?;
                assigned.insert(RESULT.to_string());
            }
        }
    }
    Ok(())
}

fn subst_length(e: &IntExpr, arrays: &BTreeMap<String, usize>) -> IntExpr {
    match e {
        IntExpr::Length(a) => match arrays.get(a) {
            Some(n) => IntExpr::Lit(*n as i64),
            None => e.clone(),
        },
        IntExpr::Lit(_) | IntExpr::Var(_) => e.clone(),
        IntExpr::Read(a, i) => IntExpr::Read(a.clone(), Box::new(subst_length(i, arrays))),
        IntExpr::Neg(a) => IntExpr::Neg(Box::new(subst_length(a, arrays))),
        IntExpr::Bin(op, a, b) => IntExpr::Bin(*op, Box::new(subst_length(a, arrays)), Box::new(subst_length(b, arrays))),
    }
}

fn map_bool(b: &BoolExpr, f: &dyn Fn(&IntExpr) -> IntExpr) -> BoolExpr {
    match b {
        BoolExpr::Lit(x) => BoolExpr::Lit(*x),
        BoolExpr::Cmp(r, x, y) => BoolExpr::Cmp(*r, f(x), f(y)),
        BoolExpr::Not(a) => BoolExpr::Not(Box::new(map_bool(a, f))),
        BoolExpr::And(a, c) => BoolExpr::And(Box::new(map_bool(a, f)), Box::new(map_bool(c, f))),
        BoolExpr::Or(a, c) => BoolExpr::Or(Box::new(map_bool(a, f)), Box::new(map_bool(c, f))),
        BoolExpr::Implies(a, c) => BoolExpr::Implies(Box::new(map_bool(a, f)), Box::new(map_bool(c, f))),
        BoolExpr::ForAll { index, lo, hi, body } => BoolExpr::ForAll {
            index: index.clone(),
            lo: f(lo),
            hi: f(hi),
            body: Box::new(map_bool(body, f)),
        },
    }
}

fn map_stmt(s: &Stmt, f: &dyn Fn(&IntExpr) -> IntExpr) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Assign { target, value, declares } => StmtKind::Assign {
            target: match target {
                LValue::Var(n) => LValue::Var(n.clone()),
                LValue::Cell(a, i) => LValue::Cell(a.clone(), f(i)),
            },
            value: f(value),
            declares: *declares,
        },
        StmtKind::If { cond, then_branch, else_branch } => StmtKind::If {
            cond: map_bool(cond, f),
            then_branch: then_branch.iter().map(|s| map_stmt(s, f)).collect(),
            else_branch: else_branch.iter().map(|s| map_stmt(s, f)).collect(),
        },
        StmtKind::While { cond, body } => StmtKind::While {
            cond: map_bool(cond, f),
            body: body.iter().map(|s| map_stmt(s, f)).collect(),
        },
        StmtKind::Return(e) => StmtKind::Return(f(e)),
    };
    Stmt { line: s.line, kind }
}

fn rename_int(e: &IntExpr, from: &str, to: &str) -> IntExpr {
    match e {
        IntExpr::Var(n) if n == from => IntExpr::Var(to.to_string()),
        IntExpr::Lit(_) | IntExpr::Var(_) | IntExpr::Length(_) => e.clone(),
        IntExpr::Read(a, i) => IntExpr::Read(a.clone(), Box::new(rename_int(i, from, to))),
        IntExpr::Neg(a) => IntExpr::Neg(Box::new(rename_int(a, from, to))),
        IntExpr::Bin(op, a, b) => IntExpr::Bin(*op, Box::new(rename_int(a, from, to)), Box::new(rename_int(b, from, to))),
    }
}

fn rename_bool(b: &BoolExpr, from: &str, to: &str) -> BoolExpr {
    map_bool(b, &|e| rename_int(e, from, to))
}

fn mentions_int(e: &IntExpr, name: &str) -> bool {
    match e {
        IntExpr::Var(n) => n == name,
        IntExpr::Lit(_) | IntExpr::Length(_) => false,
        IntExpr::Read(_, i) | IntExpr::Neg(i) => mentions_int(i, name),
        IntExpr::Bin(_, a, b) => mentions_int(a, name) || mentions_int(b, name),
    }
}

fn mentions_bool(b: &BoolExpr, name: &str) -> bool {
    match b {
        BoolExpr::Lit(_) => false,
        BoolExpr::Cmp(_, x, y) => mentions_int(x, name) || mentions_int(y, name),
        BoolExpr::Not(a) => mentions_bool(a, name),
        BoolExpr::And(a, c) | BoolExpr::Or(a, c) | BoolExpr::Implies(a, c) => {
            mentions_bool(a, name) || mentions_bool(c, name)
        }
        BoolExpr::ForAll { lo, hi, body, .. } => {
            mentions_int(lo, name) || mentions_int(hi, name) || mentions_bool(body, name)
        }
    }
}
