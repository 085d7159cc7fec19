use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Assign, Cfg, CfgError, Cond, Expr, Node, NodeId, NodeKind, Stage, Succ, VarKind, VarRef};
use crate::LocRef;

type Versions = BTreeMap<String, u32>;

/// Renames an unrolled graph into dynamic single assignment form.
///
/// Parameters and locals declared without a value start at version 0;
/// locals declared with a value get version 0 from that declaration. Each
/// assignment creates the next version. At a join the version is the
/// maximum over the incoming edges, and an edge arriving with an older
/// version gets a copy block `x_max = x_old`.
pub fn to_dsa(cfg: &Cfg) -> Result<Cfg, CfgError> {
    let Stage::Unrolled(b) = cfg.stage else {
        return Err(CfgError::WrongStage(cfg.stage));
    };
    let mut g = cfg.clone();
    let order = g.topological_order().ok_or(CfgError::WrongStage(Stage::Cyclic))?;
    let preds = g.predecessors();

    let mut initial = Versions::new();
    for v in &g.vars {
        match v.kind {
            VarKind::Param | VarKind::Local { initialized: false } => {
                initial.insert(v.name.clone(), 0);
            }
            VarKind::Local { initialized: true } | VarKind::Result => {}
        }
    }

    let mut out: Vec<Option<Versions>> = vec![None; g.nodes.len()];
    let mut final_versions = Versions::new();
    for n in order {
        let state = if n == g.entry {
            initial.clone()
        } else {
            let incoming: Vec<(NodeId, Versions)> = preds[n]
                .iter()
                .filter_map(|p| out[*p].clone().map(|s| (*p, s)))
                .collect();
            let mut merged = Versions::new();
            for (_, s) in &incoming {
                for (name, v) in s {
                    let e = merged.entry(name.clone()).or_insert(*v);
                    *e = (*e).max(*v);
                }
            }
            for (p, s) in &incoming {
                let copies: Vec<Assign> = merged
                    .iter()
                    .filter_map(|(name, v)| match s.get(name) {
                        Some(old) if old < v => Some(Assign::Copy {
                            name: name.clone(),
                            from: *old,
                            to: *v,
                            array: g.is_array(name),
                        }),
                        _ => None,
                    })
                    .collect();
                if !copies.is_empty() {
                    insert_on_edge(&mut g, *p, n, copies);
                }
            }
            merged
        };
        let mut cur = state.clone();
        rename_node(&mut g.nodes[n], &mut cur);
        if n == g.exit {
            final_versions = state;
        }
        out[n] = Some(cur);
    }

    g.final_versions = final_versions;
    g.stage = Stage::Dsa(b);
    g.compact();
    Ok(g)
}

/// Puts a copy block on every edge `p -> n`.
fn insert_on_edge(g: &mut Cfg, p: NodeId, n: NodeId, copies: Vec<Assign>) {
    let targets = match g.nodes[p].succ {
        Succ::Branch { then_to, else_to } => [then_to == n, else_to == n],
        _ => [true, false],
    };
    for (slot, hit) in targets.into_iter().enumerate() {
        if !hit {
            continue;
        }
        g.nodes.push(Node { kind: NodeKind::Block(copies.clone()), loc: LocRef::default(), succ: Succ::Seq(n) });
        let c = g.nodes.len() - 1;
        g.nodes[p].succ = match g.nodes[p].succ {
            Succ::Branch { else_to, .. } if slot == 0 => Succ::Branch { then_to: c, else_to },
            Succ::Branch { then_to, .. } => Succ::Branch { then_to, else_to: c },
            _ => Succ::Seq(c),
        };
    }
}

fn rename_node(node: &mut Node, cur: &mut Versions) {
    match &mut node.kind {
        NodeKind::Pre(Some(c)) | NodeKind::Cond(c) | NodeKind::Bound(c) | NodeKind::Post(c) => rename_cond(c, cur),
        NodeKind::Pre(None) => {}
        NodeKind::Block(assigns) => {
            for a in assigns {
                match a {
                    Assign::Scalar { target, value, .. } => {
                        rename_expr(value, cur);
                        target.version = next(cur, &target.name);
                    }
                    Assign::Store { array, from, to, index, value, .. } => {
                        rename_expr(index, cur);
                        rename_expr(value, cur);
                        *from = cur.get(array.as_str()).copied().unwrap_or(0);
                        *to = next(cur, array);
                    }
                    Assign::Copy { .. } => {}
                }
            }
        }
    }
}

fn next(cur: &mut Versions, name: &str) -> u32 {
    let v = cur.get(name).map_or(0, |v| v + 1);
    cur.insert(String::from(name), v);
    v
}

fn rename_expr(e: &mut Expr, cur: &Versions) {
    match e {
        Expr::Lit(_) | Expr::Bound(_) => {}
        Expr::Var(v) => v.version = version(cur, v),
        Expr::Read(a, i) => {
            a.version = version(cur, a);
            rename_expr(i, cur);
        }
        Expr::Neg(a) => rename_expr(a, cur),
        Expr::Bin(_, a, b) => {
            rename_expr(a, cur);
            rename_expr(b, cur);
        }
    }
}

fn version(cur: &Versions, v: &VarRef) -> u32 {
    cur.get(&v.name).copied().unwrap_or(0)
}

fn rename_cond(c: &mut Cond, cur: &Versions) {
    match c {
        Cond::Lit(_) => {}
        Cond::Cmp(_, a, b) => {
            rename_expr(a, cur);
            rename_expr(b, cur);
        }
        Cond::Not(a) => rename_cond(a, cur),
        Cond::And(a, b) | Cond::Or(a, b) | Cond::Implies(a, b) => {
            rename_cond(a, cur);
            rename_cond(b, cur);
        }
        Cond::ForAll { lo, hi, body, .. } => {
            rename_expr(lo, cur);
            rename_expr(hi, cur);
            rename_cond(body, cur);
        }
    }
}

