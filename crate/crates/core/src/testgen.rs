//! Random program text for property tests.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use proptest::prelude::*;

const VARS: [&str; 5] = ["x", "y", "a", "b", "r"];
const TARGETS: [&str; 3] = ["a", "b", "r"];

#[derive(Clone, Debug)]
enum Gen {
    Assign(usize, String),
    If(String, Vec<Gen>, Vec<Gen>),
    While(String, Vec<Gen>),
}

fn arb_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(-3i64..4).prop_map(|v| format!("{v}")), (0..5usize).prop_map(|i| String::from(VARS[i]))];
    leaf.prop_recursive(2, 4, 2, |inner| {
        (inner.clone(), inner, 0..3usize).prop_map(|(a, b, o)| format!("({a} {} {b})", ["+", "-", "*"][o]))
    })
}

fn arb_cond() -> impl Strategy<Value = String> {
    (arb_expr(), arb_expr(), 0..6usize).prop_map(|(a, b, o)| format!("{a} {} {b}", ["==", "!=", "<", "<=", ">", ">="][o]))
}

fn arb_stmts(loops: bool) -> impl Strategy<Value = Vec<Gen>> {
    let assign = (0..3usize, arb_expr()).prop_map(|(t, e)| Gen::Assign(t, e));
    let leaf = prop::collection::vec(assign, 1..3);
    leaf.prop_recursive(3, 12, 3, move |inner| {
        let node = if loops {
            prop_oneof![
                2 => (arb_cond(), inner.clone(), inner.clone()).prop_map(|(c, t, e)| Gen::If(c, t, e)),
                1 => (arb_cond(), inner.clone()).prop_map(|(c, b)| Gen::While(c, b)),
                2 => inner.clone().prop_map(|mut v| v.remove(0)),
            ]
            .boxed()
        } else {
            prop_oneof![
                (arb_cond(), inner.clone(), inner.clone()).prop_map(|(c, t, e)| Gen::If(c, t, e)),
                inner.clone().prop_map(|mut v| v.remove(0)),
            ]
            .boxed()
        };
        prop::collection::vec(node, 1..3)
    })
}

fn conditions(stmts: &[Gen]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            Gen::Assign(..) => 0,
            Gen::If(_, t, e) => 1 + conditions(t) + conditions(e),
            Gen::While(_, b) => 1 + conditions(b),
        })
        .sum()
}

fn render(stmts: &[Gen], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for s in stmts {
        match s {
            Gen::Assign(t, e) => out.push_str(&format!("{pad}{} = {e};\n", TARGETS[*t])),
            Gen::If(c, t, e) => {
                out.push_str(&format!("{pad}if ({c}) {{\n"));
                render(t, depth + 1, out);
                if e.is_empty() {
                    out.push_str(&format!("{pad}}}\n"));
                } else {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    render(e, depth + 1, out);
                    out.push_str(&format!("{pad}}}\n"));
                }
            }
            Gen::While(c, b) => {
                out.push_str(&format!("{pad}while ({c}) {{\n"));
                render(b, depth + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
        }
    }
}

/// A two-input program with at most `max_conds` conditions.
pub(crate) fn arb_program(loops: bool, max_conds: usize) -> impl Strategy<Value = String> {
    (arb_stmts(loops), arb_cond())
        .prop_filter("too many conditions", move |(s, _)| conditions(s) <= max_conds)
        .prop_map(|(stmts, post)| {
            let mut out = format!("//@ ensures {post};\nint P(int x, int y) {{\n  int a = 0;\n  int b = 1;\n  int r = 0;\n");
            render(&stmts, 1, &mut out);
            out.push_str("}\n");
            out
        })
}
