use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use super::{Cfg, CfgError, LoopTree, Node, NodeId, NodeKind, Stage, Succ};

/// Replaces every loop by `b` nested copies of its body, outermost loops
/// first. The copy for iteration `k` tags its locations with
/// `(condition line, k)`. After the last copy control reaches a `Bound`
/// node that re-evaluates the loop condition and then leaves the loop.
pub fn unroll(cfg: &Cfg, b: u32) -> Result<Cfg, CfgError> {
    if b == 0 {
        return Err(CfgError::InvalidBound);
    }
    if cfg.stage != Stage::Cyclic {
        return Err(CfgError::WrongStage(cfg.stage));
    }
    let mut g = cfg.clone();
    let mut work: VecDeque<LoopTree> = g.loops.drain(..).collect();
    while let Some(l) = work.pop_front() {
        unroll_one(&mut g, &l, b, &mut work);
    }
    g.stage = Stage::Unrolled(b);
    g.compact();
    Ok(g)
}

fn unroll_one(g: &mut Cfg, l: &LoopTree, b: u32, work: &mut VecDeque<LoopTree>) {
    let h = l.header;
    let Succ::Branch { else_to: exit, .. } = g.nodes[h].succ else {
        unreachable!("loop header is a condition")
    };
    let NodeKind::Cond(cond) = g.nodes[h].kind.clone() else {
        unreachable!("loop header is a condition")
    };
    let line = g.nodes[h].loc.line;
    let region: Vec<NodeId> = core::iter::once(h).chain(l.body.iter().copied()).collect();

    let mut bound_loc = g.nodes[h].loc.clone();
    bound_loc.loops.push((line, b + 1));
    g.nodes.push(Node { kind: NodeKind::Bound(cond), loc: bound_loc, succ: Succ::Seq(exit) });
    let bound = g.nodes.len() - 1;

    // Allocate ids for every copy first so back edges can point forward.
    let base = g.nodes.len();
    let maps: Vec<BTreeMap<NodeId, NodeId>> = (0..b as usize)
        .map(|k| region.iter().enumerate().map(|(i, n)| (*n, base + k * region.len() + i)).collect())
        .collect();
    for k in 0..b as usize {
        let next_header = if k + 1 < b as usize { maps[k + 1][&h] } else { bound };
        for n in &region {
            let mut node = g.nodes[*n].clone();
            node.loc.loops.push((line, k as u32 + 1));
            if let NodeKind::Block(assigns) = &mut node.kind {
                for a in assigns {
                    if let Some(loc) = a.loc_mut() {
                        loc.loops.push((line, k as u32 + 1));
                    }
                }
            }
            node.succ = node.succ.map(&mut |t| {
                if t == h && *n != h {
                    next_header
                } else if let Some(c) = maps[k].get(&t) {
                    *c
                } else {
                    t
                }
            });
            g.nodes.push(node);
        }
    }

    let first = maps[0][&h];
    for (i, node) in g.nodes.iter_mut().enumerate() {
        if i < base && !l.body.contains(&i) && i != h {
            node.succ = node.succ.map(&mut |t| if t == h { first } else { t });
        }
    }
    if g.entry == h {
        g.entry = first;
    }

    for map in &maps {
        for child in &l.children {
            let f = |n: NodeId| map.get(&n).copied();
            if let Some(c) = child.map(&f) {
                work.push_back(c);
            }
        }
    }
}
