use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::ast::*;

/// Renders a program in canonical layout, one statement per line.
pub fn pretty_print(p: &SourceProgram) -> String {
    let mut out = String::new();
    if let Some(pre) = &p.precondition {
        let _ = writeln!(out, "/*@ requires {}; */", bool_str(pre));
    }
    let _ = writeln!(out, "/*@ ensures {}; */", bool_str(&p.postcondition));
    let _ = writeln!(out, "class {} {{", p.name);
    let params: alloc::vec::Vec<String> = p.params.iter().map(decl_str).collect();
    let ret = if p.returns_value { "int" } else { "void" };
    let _ = writeln!(out, "{ret} {}({}) {{", p.name, params.join(", "));
    for d in &p.locals {
        if !declared_inline(&p.body, &d.name) {
            let _ = writeln!(out, "  {};", decl_str(d));
        }
    }
    stmts(&mut out, &p.body, 1);
    out.push_str("}\n}\n");
    out
}

fn declared_inline(body: &[Stmt], name: &str) -> bool {
    body.iter().any(|s| {
        matches!(&s.kind, StmtKind::Assign { target: LValue::Var(n), declares: true, .. } if n == name)
    })
}

fn decl_str(d: &Decl) -> String {
    match d.ty {
        Type::Int => format!("int {}", d.name),
        Type::Array(Some(n)) => format!("int[{n}] {}", d.name),
        Type::Array(None) => format!("int[] {}", d.name),
    }
}

fn stmts(out: &mut String, body: &[Stmt], depth: usize) {
    let pad = "  ".repeat(depth);
    for s in body {
        match &s.kind {
            StmtKind::Assign { target, value, declares } => {
                let lhs = match target {
                    LValue::Var(n) => n.clone(),
                    LValue::Cell(a, i) => format!("{a}[{}]", int_str(i)),
                };
                let kw = if *declares { "int " } else { "" };
                let _ = writeln!(out, "{pad}{kw}{lhs} = {};", int_str(value));
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let _ = writeln!(out, "{pad}if ({}) {{", bool_str(cond));
                stmts(out, then_branch, depth + 1);
                if else_branch.is_empty() {
                    let _ = writeln!(out, "{pad}}}");
                } else {
                    let _ = writeln!(out, "{pad}}} else {{");
                    stmts(out, else_branch, depth + 1);
                    let _ = writeln!(out, "{pad}}}");
                }
            }
            StmtKind::While { cond, body } => {
                let _ = writeln!(out, "{pad}while ({}) {{", bool_str(cond));
                stmts(out, body, depth + 1);
                let _ = writeln!(out, "{pad}}}");
            }
            StmtKind::Return(e) => {
                let _ = writeln!(out, "{pad}return {};", int_str(e));
            }
        }
    }
}

fn int_prec(e: &IntExpr) -> u8 {
    match e {
        IntExpr::Bin(ArithOp::Add | ArithOp::Sub, ..) => 6,
        IntExpr::Bin(ArithOp::Mul, ..) => 7,
        IntExpr::Neg(_) => 8,
        IntExpr::Lit(n) if *n < 0 => 8,
        _ => 9,
    }
}

pub fn int_str(e: &IntExpr) -> String {
    match e {
        IntExpr::Lit(n) => format!("{n}"),
        IntExpr::Var(n) => n.clone(),
        IntExpr::Read(a, i) => format!("{a}[{}]", int_str(i)),
        IntExpr::Length(a) => format!("{a}.length"),
        IntExpr::Neg(a) => format!("-{}", wrap(a, int_prec(a) < 9)),
        IntExpr::Bin(op, a, b) => {
            let p = int_prec(e);
            format!("{} {} {}", wrap(a, int_prec(a) < p), op.symbol(), wrap(b, int_prec(b) <= p))
        }
    }
}

fn wrap(e: &IntExpr, paren: bool) -> String {
    if paren {
        format!("({})", int_str(e))
    } else {
        int_str(e)
    }
}

fn bool_prec(b: &BoolExpr) -> u8 {
    match b {
        BoolExpr::Implies(..) => 1,
        BoolExpr::Or(..) => 2,
        BoolExpr::And(..) => 3,
        BoolExpr::Not(_) => 4,
        BoolExpr::Cmp(..) => 5,
        _ => 9,
    }
}

pub fn bool_str(b: &BoolExpr) -> String {
    let sub = |x: &BoolExpr, paren: bool| if paren { format!("({})", bool_str(x)) } else { bool_str(x) };
    match b {
        BoolExpr::Lit(v) => format!("{v}"),
        BoolExpr::Cmp(r, x, y) => format!("{} {} {}", int_str(x), r.symbol(), int_str(y)),
        BoolExpr::Not(a) => format!("!{}", sub(a, bool_prec(a) < 4)),
        BoolExpr::And(a, c) => format!("{} && {}", sub(a, bool_prec(a) < 3), sub(c, bool_prec(c) <= 3)),
        BoolExpr::Or(a, c) => format!("{} || {}", sub(a, bool_prec(a) < 2), sub(c, bool_prec(c) <= 2)),
        BoolExpr::Implies(a, c) => format!("{} ==> {}", sub(a, bool_prec(a) <= 1), sub(c, bool_prec(c) < 1)),
        BoolExpr::ForAll { index, lo, hi, body } => format!(
            "(\\forall int {index}; {index} >= {} && {index} < {}; {})",
            int_str(lo),
            int_str(hi),
            bool_str(body)
        ),
    }
}
