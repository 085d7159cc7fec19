use super::*;
use crate::frontend::{load, ParseOptions};
use crate::testgen::arb_program;
use alloc::collections::BTreeSet;
use alloc::string::ToString;
use proptest::prelude::*;

const ABSMINUS: &str = include_str!("../../../../programs/absminus.mimp");
const MINIMUM: &str = include_str!("../../../../programs/minimum.mimp");

fn prepare(src: &str, b: u32) -> Cfg {
    let p = load(src, &ParseOptions::default()).unwrap();
    to_dsa(&unroll(&build_cfg(&p), b).unwrap()).unwrap()
}

fn assigns(g: &Cfg) -> Vec<String> {
    let mut out = Vec::new();
    for n in &g.nodes {
        if let NodeKind::Block(a) = &n.kind {
            out.extend(a.iter().map(|a| a.to_string()));
        }
    }
    out
}

fn conds(g: &Cfg) -> Vec<String> {
    g.nodes
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Cond(c) => Some(alloc::format!("{}@{}", c, n.loc)),
            _ => None,
        })
        .collect()
}

#[test]
fn absminus_structure() {
    let p = load(ABSMINUS, &ParseOptions::default()).unwrap();
    let g = build_cfg(&p);
    assert_eq!(g.condition_nodes().len(), 2);
    assert!(!g.has_cycle());
    for c in g.condition_nodes() {
        assert!(matches!(g.nodes[c].succ, Succ::Branch { .. }));
    }
    let d = to_dsa(&unroll(&g, 1).unwrap()).unwrap();
    let a = assigns(&d);
    assert!(a.contains(&"k_0 = 0".to_string()));
    assert!(a.contains(&"k_1 = k_0 + 2".to_string()));
    assert!(a.contains(&"k_1 = k_0".to_string()), "{a:?}");
    assert!(a.contains(&"result_1 = j_0 - i_0".to_string()));
    assert!(a.contains(&"result_1 = i_0 - j_0".to_string()));
    assert_eq!(conds(&d), ["i_0 <= j_0@8", "(k_1 == 1 && i_0 != j_0)@11"]);
    assert_eq!(d.final_versions["result"], 1);
}

#[test]
fn minimum_unrolled() {
    let g = prepare(MINIMUM, 3);
    let cs = conds(&g);
    let headers: Vec<&String> = cs.iter().filter(|c| c.contains("< 4 - 1")).collect();
    assert_eq!(headers.len(), 3);
    assert!(headers[0].ends_with("@9:1") && headers[2].ends_with("@9:3"));
    assert!(cs.contains(&"tab_0[i_1] <= min_1@9:2.10".to_string()), "{cs:?}");
    let a = assigns(&g);
    assert!(a.contains(&"min_2 = tab_0[i_1]".to_string()));
    assert!(a.contains(&"i_2 = i_1 + 1".to_string()));
    assert!(a.contains(&"min_2 = min_1".to_string()));
    assert_eq!(g.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Bound(_))).count(), 1);
    assert_eq!(g.final_versions["min"], 3);
    assert_eq!(g.final_versions["i"], 3);
}

#[test]
fn loop_free_unchanged_by_unrolling() {
    let p = load(ABSMINUS, &ParseOptions::default()).unwrap();
    let g = build_cfg(&p);
    for b in [1, 2, 5] {
        let u = unroll(&g, b).unwrap();
        assert_eq!(u.nodes, g.nodes);
    }
}

#[test]
fn nested_loops_multiply() {
    let src = "//@ ensures x >= 0;\nint f(int x) {\n int i = 0;\n int j = 0;\n while (i < 2) {\n  j = 0;\n  while (j < 2) {\n   x = x + 1;\n   j = j + 1;\n  }\n  i = i + 1;\n }\n}";
    let p = load(src, &ParseOptions::default()).unwrap();
    let g = unroll(&build_cfg(&p), 2).unwrap();
    assert!(!g.has_cycle());
    let locs: Vec<String> = g.condition_nodes().iter().map(|n| g.nodes[*n].loc.to_string()).collect();
    assert_eq!(locs, ["5:1", "5:1.7:1", "5:1.7:2", "5:2", "5:2.7:1", "5:2.7:2"]);
    let x_assigns: Vec<String> = g
        .nodes
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Block(a) => a.iter().find_map(|a| a.loc().filter(|l| l.line == 8).map(|l| l.to_string())),
            _ => None,
        })
        .collect();
    assert_eq!(x_assigns, ["5:1.7:1.8", "5:1.7:2.8", "5:2.7:1.8", "5:2.7:2.8"]);
}

#[test]
fn stage_errors() {
    let p = load(ABSMINUS, &ParseOptions::default()).unwrap();
    let g = build_cfg(&p);
    assert_eq!(unroll(&g, 0), Err(CfgError::InvalidBound));
    assert!(to_dsa(&g).is_err());
    let u = unroll(&g, 1).unwrap();
    assert!(unroll(&u, 1).is_err());
}

/// Every path: targets never repeat and every read is defined earlier on
/// the path or is an initial version.
fn check_paths(g: &Cfg) -> Result<(), String> {
    let mut initial = BTreeSet::new();
    for v in &g.vars {
        if matches!(v.kind, VarKind::Param | VarKind::Local { initialized: false }) {
            initial.insert(VarRef::new(&v.name, 0));
        }
    }
    let mut stack = vec![(g.entry, initial)];
    let mut paths = 0;
    while let Some((n, defined)) = stack.pop() {
        paths += 1;
        if paths > 5000 {
            return Ok(());
        }
        let mut defined = defined;
        let mut reads = Vec::new();
        match &g.nodes[n].kind {
            NodeKind::Block(assigns) => {
                for a in assigns {
                    let (read, target) = match a {
                        Assign::Scalar { target, value, .. } => (expr_vars(value), target.clone()),
                        Assign::Store { array, from, to, index, value, .. } => {
                            let mut r = expr_vars(index);
                            r.extend(expr_vars(value));
                            r.push(VarRef::new(array, *from));
                            (r, VarRef::new(array, *to))
                        }
                        Assign::Copy { name, from, to, .. } => (vec![VarRef::new(name, *from)], VarRef::new(name, *to)),
                    };
                    for r in read {
                        if !defined.contains(&r) {
                            return Err(alloc::format!("{r} read before definition in {a}"));
                        }
                    }
                    if !defined.insert(target.clone()) {
                        return Err(alloc::format!("{target} assigned twice"));
                    }
                }
            }
            NodeKind::Cond(c) | NodeKind::Bound(c) => reads = cond_vars(c),
            _ => {}
        }
        for r in reads {
            if !defined.contains(&r) {
                return Err(alloc::format!("{r} read before definition at node {n}"));
            }
        }
        for t in g.nodes[n].succ.targets() {
            stack.push((t, defined.clone()));
        }
    }
    Ok(())
}

fn expr_vars(e: &Expr) -> Vec<VarRef> {
    match e {
        Expr::Lit(_) | Expr::Bound(_) => vec![],
        Expr::Var(v) => vec![v.clone()],
        Expr::Read(a, i) => {
            let mut v = expr_vars(i);
            v.push(a.clone());
            v
        }
        Expr::Neg(a) => expr_vars(a),
        Expr::Bin(_, a, b) => {
            let mut v = expr_vars(a);
            v.extend(expr_vars(b));
            v
        }
    }
}

fn cond_vars(c: &Cond) -> Vec<VarRef> {
    match c {
        Cond::Lit(_) => vec![],
        Cond::Cmp(_, a, b) => {
            let mut v = expr_vars(a);
            v.extend(expr_vars(b));
            v
        }
        Cond::Not(a) => cond_vars(a),
        Cond::And(a, b) | Cond::Or(a, b) | Cond::Implies(a, b) => {
            let mut v = cond_vars(a);
            v.extend(cond_vars(b));
            v
        }
        Cond::ForAll { lo, hi, body, .. } => {
            let mut v = expr_vars(lo);
            v.extend(expr_vars(hi));
            v.extend(cond_vars(body));
            v
        }
    }
}

#[test]
fn benchmarks_are_single_assignment() {
    check_paths(&prepare(ABSMINUS, 1)).unwrap();
    check_paths(&prepare(MINIMUM, 3)).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn unrolled_dsa_is_acyclic_and_single_assignment(src in arb_program(true, 6), b in 1u32..4) {
        let p = load(&src, &ParseOptions::default()).unwrap();
        let g = build_cfg(&p);
        let u = unroll(&g, b).unwrap();
        prop_assert!(!u.has_cycle());
        for c in u.condition_nodes() {
            let ok = matches!(u.nodes[c].succ, Succ::Branch { .. });
            prop_assert!(ok);
        }
        let d = to_dsa(&u).unwrap();
        prop_assert!(!d.has_cycle());
        check_paths(&d).map_err(TestCaseError::fail)?;
    }
}
