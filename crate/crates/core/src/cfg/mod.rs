//! Control flow graphs, loop unrolling and DSA renaming.
//!
//! [`build_cfg`] produces a graph with back edges, [`unroll`] replaces every
//! loop by `b` nested copies of its body, and [`to_dsa`] renames variables
//! so that each version is assigned at most once on any path.

mod dsa;
mod ir;
mod unroll;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use dsa::to_dsa;
pub use ir::{Assign, Cond, Expr, VarRef};
pub use unroll::unroll;

use crate::frontend::{BoolExpr, IntExpr, LValue, Stmt, StmtKind, Type, ValidatedProgram, RESULT};
use crate::LocRef;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Entry; carries the precondition if any.
    Pre(Option<Cond>),
    Cond(Cond),
    /// Straight-line assignments.
    Block(Vec<Assign>),
    /// Stands after the last copy of an unrolled loop; its condition tells
    /// whether the run wanted another iteration.
    Bound(Cond),
    /// Exit; carries the postcondition.
    Post(Cond),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Succ {
    None,
    Seq(NodeId),
    Branch { then_to: NodeId, else_to: NodeId },
}

impl Succ {
    pub fn targets(&self) -> Vec<NodeId> {
        match *self {
            Succ::None => vec![],
            Succ::Seq(n) => vec![n],
            Succ::Branch { then_to, else_to } => vec![then_to, else_to],
        }
    }

    fn map(&self, f: &mut impl FnMut(NodeId) -> NodeId) -> Succ {
        match *self {
            Succ::None => Succ::None,
            Succ::Seq(n) => Succ::Seq(f(n)),
            Succ::Branch { then_to, else_to } => Succ::Branch { then_to: f(then_to), else_to: f(else_to) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub loc: LocRef,
    pub succ: Succ,
}

/// A loop of a graph that still has back edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopTree {
    pub header: NodeId,
    /// Every node of the body, nested loops included; not the header.
    pub body: BTreeSet<NodeId>,
    pub children: Vec<LoopTree>,
}

impl LoopTree {
    fn map(&self, f: &impl Fn(NodeId) -> Option<NodeId>) -> Option<LoopTree> {
        Some(LoopTree {
            header: f(self.header)?,
            body: self.body.iter().filter_map(|n| f(*n)).collect(),
            children: self.children.iter().filter_map(|c| c.map(f)).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Param,
    /// `initialized` for locals declared with a value.
    Local { initialized: bool },
    Result,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    /// Length for arrays.
    pub len: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Cyclic,
    Unrolled(u32),
    Dsa(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub name: String,
    pub nodes: Vec<Node>,
    pub entry: NodeId,
    pub exit: NodeId,
    pub loops: Vec<LoopTree>,
    pub vars: Vec<VarInfo>,
    pub stage: Stage,
    /// Versions in effect at the exit, after renaming.
    pub final_versions: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfgError {
    /// Unroll bound must be at least 1.
    InvalidBound,
    /// The operation needs a graph at another stage.
    WrongStage(Stage),
}

impl fmt::Display for CfgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfgError::InvalidBound => f.write_str("unroll bound must be at least 1"),
            CfgError::WrongStage(s) => write!(f, "operation not valid on a graph at stage {s:?}"),
        }
    }
}

impl core::error::Error for CfgError {}

impl Cfg {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn var(&self, name: &str) -> Option<&VarInfo> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn is_array(&self, name: &str) -> bool {
        self.var(name).is_some_and(|v| v.len.is_some())
    }

    pub fn condition_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|n| matches!(self.nodes[*n].kind, NodeKind::Cond(_))).collect()
    }

    /// Predecessor lists, in increasing id order.
    pub fn predecessors(&self) -> Vec<Vec<NodeId>> {
        let mut preds = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for t in n.succ.targets() {
                if !preds[t].contains(&i) {
                    preds[t].push(i);
                }
            }
        }
        preds
    }

    pub fn has_cycle(&self) -> bool {
        self.topological_order().is_none()
    }

    /// Kahn's algorithm, smallest ready id first.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indeg = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            for t in n.succ.targets() {
                indeg[t] += 1;
            }
        }
        let mut ready: BTreeSet<NodeId> = (0..self.nodes.len()).filter(|n| indeg[*n] == 0).collect();
        let mut out = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop_first() {
            out.push(n);
            for t in self.nodes[n].succ.targets() {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.insert(t);
                }
            }
        }
        (out.len() == self.nodes.len()).then_some(out)
    }

    /// Drops unreachable nodes and renumbers the rest in depth-first
    /// preorder from the entry, `then` before `else`.
    pub(crate) fn compact(&mut self) {
        let mut order = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.entry];
        while let Some(n) = stack.pop() {
            if seen[n] {
                continue;
            }
            seen[n] = true;
            order.push(n);
            let mut ts = self.nodes[n].succ.targets();
            ts.reverse();
            stack.extend(ts);
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (new, old) in order.iter().enumerate() {
            map[*old] = new;
        }
        let nodes = order
            .iter()
            .map(|old| {
                let mut n = self.nodes[*old].clone();
                n.succ = n.succ.map(&mut |t| map[t]);
                n
            })
            .collect();
        self.nodes = nodes;
        self.entry = map[self.entry];
        self.exit = map[self.exit];
        let f = |n: NodeId| (map[n] != usize::MAX).then_some(map[n]);
        self.loops = self.loops.iter().filter_map(|l| l.map(&f)).collect();
    }
}

struct Builder {
    nodes: Vec<Node>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, loc: LocRef, succ: Succ) -> NodeId {
        self.nodes.push(Node { kind, loc, succ });
        self.nodes.len() - 1
    }

    fn flush(&mut self, run: &mut Vec<Assign>, next: NodeId) -> NodeId {
        if run.is_empty() {
            return next;
        }
        run.reverse();
        let assigns = core::mem::take(run);
        let loc = assigns[0].loc().cloned().unwrap_or_default();
        self.push(NodeKind::Block(assigns), loc, Succ::Seq(next))
    }

    /// Builds `stmts` backwards so that every node knows its successor.
    fn seq(&mut self, stmts: &[Stmt], mut next: NodeId) -> (NodeId, Vec<LoopTree>) {
        let mut loops = Vec::new();
        let mut run = Vec::new();
        for s in stmts.iter().rev() {
            let loc = LocRef::new(s.line);
            match &s.kind {
                StmtKind::Assign { target: LValue::Var(n), value, .. } => run.push(Assign::Scalar {
                    target: VarRef::new(n, 0),
                    value: lower_int(value, &[]),
                    loc,
                }),
                StmtKind::Assign { target: LValue::Cell(a, i), value, .. } => run.push(Assign::Store {
                    array: a.clone(),
                    from: 0,
                    to: 0,
                    index: lower_int(i, &[]),
                    value: lower_int(value, &[]),
                    loc,
                }),
                StmtKind::Return(e) => run.push(Assign::Scalar {
                    target: VarRef::new(RESULT, 0),
                    value: lower_int(e, &[]),
                    loc,
                }),
                StmtKind::If { cond, then_branch, else_branch } => {
                    next = self.flush(&mut run, next);
                    let (t, tl) = self.seq(then_branch, next);
                    let (e, el) = self.seq(else_branch, next);
                    let c = lower_bool(cond, &mut Vec::new());
                    next = self.push(NodeKind::Cond(c), loc, Succ::Branch { then_to: t, else_to: e });
                    loops.extend(el.into_iter().rev());
                    loops.extend(tl.into_iter().rev());
                }
                StmtKind::While { cond, body } => {
                    next = self.flush(&mut run, next);
                    let c = lower_bool(cond, &mut Vec::new());
                    let header = self.push(NodeKind::Cond(c), loc, Succ::None);
                    let start = self.nodes.len();
                    let (mut b, children) = self.seq(body, header);
                    if b == header {
                        b = self.push(NodeKind::Block(Vec::new()), LocRef::new(s.line), Succ::Seq(header));
                    }
                    let end = self.nodes.len();
                    self.nodes[header].succ = Succ::Branch { then_to: b, else_to: next };
                    loops.push(LoopTree { header, body: (start..end).collect(), children });
                    next = header;
                }
            }
        }
        next = self.flush(&mut run, next);
        loops.reverse();
        (next, loops)
    }
}

pub(crate) fn lower_int(e: &IntExpr, bound: &[String]) -> Expr {
    match e {
        IntExpr::Lit(v) => Expr::Lit(*v),
        IntExpr::Var(n) if bound.contains(n) => Expr::Bound(n.clone()),
        IntExpr::Var(n) => Expr::Var(VarRef::new(n, 0)),
        IntExpr::Read(a, i) => Expr::Read(VarRef::new(a, 0), Box::new(lower_int(i, bound))),
        IntExpr::Length(_) => unreachable!("lengths are resolved by the checker"),
        IntExpr::Neg(a) => Expr::Neg(Box::new(lower_int(a, bound))),
        IntExpr::Bin(op, a, b) => Expr::Bin(*op, Box::new(lower_int(a, bound)), Box::new(lower_int(b, bound))),
    }
}

pub(crate) fn lower_bool(b: &BoolExpr, bound: &mut Vec<String>) -> Cond {
    match b {
        BoolExpr::Lit(v) => Cond::Lit(*v),
        BoolExpr::Cmp(r, x, y) => Cond::Cmp(*r, lower_int(x, bound), lower_int(y, bound)),
        BoolExpr::Not(a) => Cond::Not(Box::new(lower_bool(a, bound))),
        BoolExpr::And(a, c) => Cond::And(Box::new(lower_bool(a, bound)), Box::new(lower_bool(c, bound))),
        BoolExpr::Or(a, c) => Cond::Or(Box::new(lower_bool(a, bound)), Box::new(lower_bool(c, bound))),
        BoolExpr::Implies(a, c) => Cond::Implies(Box::new(lower_bool(a, bound)), Box::new(lower_bool(c, bound))),
        BoolExpr::ForAll { index, lo, hi, body } => {
            let lo = lower_int(lo, bound);
            let hi = lower_int(hi, bound);
            bound.push(index.clone());
            let body = lower_bool(body, bound);
            bound.pop();
            Cond::ForAll { index: index.clone(), lo, hi, body: Box::new(body) }
        }
    }
}

/// Builds the graph of a checked program. Loops keep their back edges.
pub fn build_cfg(program: &ValidatedProgram) -> Cfg {
    let p = program.program();
    let mut b = Builder { nodes: Vec::new() };
    let post = lower_bool(&p.postcondition, &mut Vec::new());
    let exit = b.push(NodeKind::Post(post), LocRef::default(), Succ::None);
    let (first, loops) = b.seq(&p.body, exit);
    let pre = p.precondition.as_ref().map(|c| lower_bool(c, &mut Vec::new()));
    let entry = b.push(NodeKind::Pre(pre), LocRef::default(), Succ::Seq(first));

    let initialized: BTreeSet<&str> = p
        .body
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::Assign { target: LValue::Var(n), declares: true, .. } => Some(n.as_str()),
            _ => None,
        })
        .collect();
    let len = |t: Type| match t {
        Type::Array(n) => Some(n.unwrap_or(0)),
        Type::Int => None,
    };
    let mut vars: Vec<VarInfo> = p
        .params
        .iter()
        .map(|d| VarInfo { name: d.name.clone(), kind: VarKind::Param, len: len(d.ty) })
        .collect();
    vars.extend(p.locals.iter().map(|d| VarInfo {
        name: d.name.clone(),
        kind: VarKind::Local { initialized: initialized.contains(d.name.as_str()) },
        len: len(d.ty),
    }));
    if matches!(p.body.last(), Some(Stmt { kind: StmtKind::Return(_), .. })) {
        vars.push(VarInfo { name: String::from(RESULT), kind: VarKind::Result, len: None });
    }

    let mut cfg = Cfg {
        name: p.name.clone(),
        nodes: b.nodes,
        entry,
        exit,
        loops,
        vars,
        stage: Stage::Cyclic,
        final_versions: BTreeMap::new(),
    };
    cfg.compact();
    cfg
}

#[cfg(test)]
mod tests;
