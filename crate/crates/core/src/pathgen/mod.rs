//! Counterexample propagation and path constraint systems.
//!
//! [`propagate`] runs concrete values through a DSA graph, optionally taking
//! the opposite branch at chosen conditions. The traversed path is then
//! turned into a [`PathCsp`] whose soft part holds the path's assignments.

mod csp;
mod nnf;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use csp::{ce_path_csp, deviated_path_csp, PathCsp, SoftConstraint};
pub use nnf::{expand_quantifiers, flip, nnf};

use crate::cfg::{Assign, Cfg, Cond, Expr, NodeId, NodeKind, Stage, Succ, VarKind, VarRef};
use crate::frontend::ArithOp;
use crate::input::{Counterexample, InputError, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Then,
    Else,
}

impl Branch {
    pub fn from_bool(b: bool) -> Branch {
        if b {
            Branch::Then
        } else {
            Branch::Else
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Then => Branch::Else,
            Branch::Else => Branch::Then,
        }
    }
}

/// Concrete value of every version assigned so far.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub scalars: BTreeMap<VarRef, i64>,
    pub arrays: BTreeMap<VarRef, Vec<i64>>,
}

impl Valuation {
    pub fn scalar(&self, name: &str, version: u32) -> Option<i64> {
        self.scalars.get(&VarRef::new(name, version)).copied()
    }

    pub fn array(&self, name: &str, version: u32) -> Option<&[i64]> {
        self.arrays.get(&VarRef::new(name, version)).map(Vec::as_slice)
    }
}

/// Runtime error hit while propagating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fault {
    IndexOutOfBounds { node: NodeId, array: String, index: i64 },
    Overflow { node: NodeId },
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::IndexOutOfBounds { node, array, index } => {
                write!(f, "node {node}: index {index} out of bounds for `{array}`")
            }
            Fault::Overflow { node } => write!(f, "node {node}: integer overflow"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathError {
    Input(InputError),
    WrongStage(Stage),
    DeviationOffPath(NodeId),
    NoDeviation,
    NotACounterexample,
    UnboundedQuantifier,
    Fault(Fault),
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::Input(e) => write!(f, "{e}"),
            PathError::WrongStage(s) => write!(f, "expected a graph in DSA form, found {s:?}"),
            PathError::DeviationOffPath(n) => write!(f, "deviated condition {n} is not on the induced path"),
            PathError::NoDeviation => f.write_str("empty deviation set"),
            PathError::NotACounterexample => f.write_str("the input satisfies the postcondition"),
            PathError::UnboundedQuantifier => f.write_str("quantifier bounds are not constant"),
            PathError::Fault(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PathError {}

/// Result of running a counterexample through the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Propagation {
    pub path: Vec<NodeId>,
    pub valuation: Valuation,
    pub post_holds: bool,
    pub pre_holds: bool,
    /// Branch the concrete values select at each condition on the path,
    /// before any deviation is applied.
    pub natural: BTreeMap<NodeId, Branch>,
    /// Some unrolled loop wanted one more iteration.
    pub truncated: bool,
    /// Set when the run stopped early; `post_holds` is then false.
    pub fault: Option<Fault>,
}

impl Propagation {
    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.path.iter().position(|n| *n == node)
    }

    /// Condition nodes on the path, in path order.
    pub fn conditions<'a>(&'a self, cfg: &'a Cfg) -> impl Iterator<Item = NodeId> + 'a {
        self.path.iter().copied().filter(|n| matches!(cfg.nodes[*n].kind, NodeKind::Cond(_)))
    }
}

pub(crate) fn initial_valuation(cfg: &Cfg, ce: &Counterexample) -> Result<Valuation, PathError> {
    let mut val = Valuation::default();
    for v in cfg.vars.iter().filter(|v| v.kind == VarKind::Param) {
        let given = ce.get(&v.name).ok_or_else(|| PathError::Input(InputError::Missing(v.name.clone())))?;
        let shape = || PathError::Input(InputError::Shape(v.name.clone()));
        match (v.len, given) {
            (None, Value::Int(x)) => {
                val.scalars.insert(VarRef::new(&v.name, 0), *x);
            }
            (Some(n), Value::Array(cells)) if cells.len() == n => {
                val.arrays.insert(VarRef::new(&v.name, 0), cells.clone());
            }
            (Some(1), Value::Int(x)) => {
                val.arrays.insert(VarRef::new(&v.name, 0), vec![*x]);
            }
            _ => return Err(shape()),
        }
    }
    if let Some(extra) = ce.bindings.keys().find(|k| !cfg.vars.iter().any(|v| v.kind == VarKind::Param && &v.name == *k)) {
        return Err(PathError::Input(InputError::Unknown(extra.clone())));
    }
    Ok(val)
}

pub(crate) struct Eval<'a> {
    pub val: &'a Valuation,
    pub node: NodeId,
}

impl Eval<'_> {
    pub fn cell(&self, a: &VarRef, idx: i64) -> Result<i64, Fault> {
        let oob = || Fault::IndexOutOfBounds { node: self.node, array: a.name.clone(), index: idx };
        let cells = self.val.arrays.get(a).ok_or_else(oob)?;
        usize::try_from(idx).ok().and_then(|i| cells.get(i).copied()).ok_or_else(oob)
    }

    pub fn int(&self, e: &Expr) -> Result<i64, Fault> {
        let ovf = Fault::Overflow { node: self.node };
        Ok(match e {
            Expr::Lit(v) => *v,
            // Versions without a value belong to locals never assigned.
            Expr::Var(v) => self.val.scalars.get(v).copied().unwrap_or(0),
            Expr::Read(a, i) => self.cell(a, self.int(i)?)?,
            Expr::Bound(_) => unreachable!("quantifiers are expanded before evaluation"),
            Expr::Neg(a) => self.int(a)?.checked_neg().ok_or(ovf)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                match op {
                    ArithOp::Add => x.checked_add(y),
                    ArithOp::Sub => x.checked_sub(y),
                    ArithOp::Mul => x.checked_mul(y),
                }
                .ok_or(ovf)?
            }
        })
    }

    pub fn cond(&self, c: &Cond) -> Result<bool, Fault> {
        Ok(match c {
            Cond::Lit(v) => *v,
            Cond::Cmp(r, a, b) => r.holds(self.int(a)? as i128, self.int(b)? as i128),
            Cond::Not(a) => !self.cond(a)?,
            Cond::And(a, b) => self.cond(a)? && self.cond(b)?,
            Cond::Or(a, b) => self.cond(a)? || self.cond(b)?,
            Cond::Implies(a, b) => !self.cond(a)? || self.cond(b)?,
            Cond::ForAll { .. } => unreachable!("quantifiers are expanded before evaluation"),
        })
    }
}

fn execute(a: &Assign, val: &mut Valuation, node: NodeId) -> Result<(), Fault> {
    match a {
        Assign::Scalar { target, value, .. } => {
            let v = Eval { val, node }.int(value)?;
            val.scalars.insert(target.clone(), v);
        }
        Assign::Store { array, from, to, index, value, .. } => {
            let from = VarRef::new(array, *from);
            let ev = Eval { val, node };
            let idx = ev.int(index)?;
            let v = ev.int(value)?;
            ev.cell(&from, idx)?;
            let mut cells = val.arrays[&from].clone();
            cells[idx as usize] = v;
            val.arrays.insert(VarRef::new(array, *to), cells);
        }
        Assign::Copy { name, from, to, array: true } => {
            if let Some(cells) = val.arrays.get(&VarRef::new(name, *from)).cloned() {
                val.arrays.insert(VarRef::new(name, *to), cells);
            }
        }
        Assign::Copy { name, from, to, array: false } => {
            if let Some(v) = val.scalars.get(&VarRef::new(name, *from)).copied() {
                val.scalars.insert(VarRef::new(name, *to), v);
            }
        }
    }
    Ok(())
}

/// Runs `ce` from the entry to the postcondition, taking the opposite
/// branch at every node of `deviations`.
pub fn propagate(cfg: &Cfg, ce: &Counterexample, deviations: &[NodeId]) -> Result<Propagation, PathError> {
    if !matches!(cfg.stage, Stage::Dsa(_)) {
        return Err(PathError::WrongStage(cfg.stage));
    }
    let post = match &cfg.nodes[cfg.exit].kind {
        NodeKind::Post(c) => expand_quantifiers(c)?,
        _ => unreachable!("exit node holds the postcondition"),
    };
    let deviations: BTreeSet<NodeId> = deviations.iter().copied().collect();
    let mut out = Propagation {
        path: Vec::new(),
        valuation: initial_valuation(cfg, ce)?,
        post_holds: false,
        pre_holds: true,
        natural: BTreeMap::new(),
        truncated: false,
        fault: None,
    };
    let mut node = cfg.entry;
    loop {
        out.path.push(node);
        let step = run_node(cfg, node, &post, &deviations, &mut out);
        match step {
            Ok(Some(next)) => node = next,
            Ok(None) => break,
            Err(f) => {
                out.fault = Some(f);
                break;
            }
        }
    }
    if let Some(d) = deviations.iter().find(|d| !out.natural.contains_key(d)) {
        return Err(PathError::DeviationOffPath(*d));
    }
    Ok(out)
}

fn run_node(
    cfg: &Cfg,
    node: NodeId,
    post: &Cond,
    deviations: &BTreeSet<NodeId>,
    out: &mut Propagation,
) -> Result<Option<NodeId>, Fault> {
    let n = &cfg.nodes[node];
    match &n.kind {
        NodeKind::Pre(pre) => {
            if let Some(pre) = pre {
                // Quantified preconditions with symbolic bounds are not checked.
                if let Ok(pre) = expand_quantifiers(pre) {
                    out.pre_holds = Eval { val: &out.valuation, node }.cond(&pre)?;
                }
            }
        }
        NodeKind::Block(assigns) => {
            for a in assigns {
                execute(a, &mut out.valuation, node)?;
            }
        }
        NodeKind::Cond(c) => {
            let natural = Branch::from_bool(Eval { val: &out.valuation, node }.cond(c)?);
            out.natural.insert(node, natural);
            let taken = if deviations.contains(&node) { natural.opposite() } else { natural };
            if let Succ::Branch { then_to, else_to } = n.succ {
                return Ok(Some(if taken == Branch::Then { then_to } else { else_to }));
            }
        }
        NodeKind::Bound(c) => {
            if (Eval { val: &out.valuation, node }).cond(c)? {
                out.truncated = true;
            }
        }
        NodeKind::Post(_) => {
            out.post_holds = Eval { val: &out.valuation, node }.cond(post)?;
            return Ok(None);
        }
    }
    match n.succ {
        Succ::Seq(next) => Ok(Some(next)),
        _ => unreachable!("only conditions branch"),
    }
}
