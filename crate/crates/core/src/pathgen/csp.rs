use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{expand_quantifiers, flip, nnf, propagate, Eval, PathError, Propagation, Valuation};
use crate::cfg::{Assign, Cfg, Cond, Expr, NodeId, NodeKind, VarKind, VarRef};
use crate::frontend::ArithOp;
use crate::input::Counterexample;
use crate::solver::{add_y_vars, Csp, Domain, Formula, Term, VarTable};
use crate::LocRef;

/// A relaxable constraint and the statement it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoftConstraint {
    pub formula: Formula,
    pub origin: LocRef,
    pub text: String,
}

/// Constraint system of one path: hard constraints always hold, soft ones
/// are the candidates for correction.
#[derive(Clone, Debug)]
pub struct PathCsp {
    pub vars: VarTable,
    pub hard: Vec<Formula>,
    pub soft: Vec<SoftConstraint>,
}

impl PathCsp {
    /// Every soft constraint guarded by its own indicator, in order.
    pub fn csp(&self) -> Csp {
        add_y_vars(self.vars.clone(), self.hard.clone(), self.soft.iter().map(|s| s.formula.clone()).collect())
    }

    /// Hard constraints plus the soft ones whose index is not in `removed`.
    pub fn without(&self, removed: &[usize]) -> Csp {
        let mut hard = self.hard.clone();
        for (i, s) in self.soft.iter().enumerate() {
            if !removed.contains(&i) {
                hard.push(s.formula.clone());
            }
        }
        Csp::new(self.vars.clone(), hard)
    }
}

struct Translator<'a> {
    cfg: &'a Cfg,
    val: &'a Valuation,
    vars: VarTable,
    domain: Domain,
    node: NodeId,
}

impl Translator<'_> {
    fn scalar(&mut self, r: &VarRef) -> Term {
        Term::var(self.vars.declare(&r.to_string(), self.domain))
    }

    fn cell(&mut self, a: &VarRef, idx: usize) -> Term {
        Term::var(self.vars.declare(&format!("{a}[{idx}]"), self.domain))
    }

    fn len(&self, name: &str) -> usize {
        self.cfg.var(name).and_then(|v| v.len).unwrap_or(0)
    }

    fn index(&self, a: &VarRef, i: &Expr) -> Result<usize, PathError> {
        let ev = Eval { val: self.val, node: self.node };
        let idx = ev.int(i).map_err(PathError::Fault)?;
        match usize::try_from(idx) {
            Ok(c) if c < self.len(&a.name) => Ok(c),
            _ => Err(PathError::Fault(super::Fault::IndexOutOfBounds { node: self.node, array: a.name.clone(), index: idx })),
        }
    }

    fn term(&mut self, e: &Expr) -> Result<Term, PathError> {
        Ok(match e {
            Expr::Lit(v) => Term::Const(*v),
            Expr::Var(r) => self.scalar(r),
            Expr::Read(a, i) => {
                let c = self.index(a, i)?;
                self.cell(a, c)
            }
            Expr::Bound(_) => unreachable!("quantifiers are expanded before translation"),
            Expr::Neg(a) => Term::neg(self.term(a)?),
            Expr::Bin(op, a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                match op {
                    ArithOp::Add => Term::add(x, y),
                    ArithOp::Sub => Term::sub(x, y),
                    ArithOp::Mul => Term::mul(x, y),
                }
            }
        })
    }

    /// `c` must be in negation normal form.
    fn formula(&mut self, c: &Cond) -> Result<Formula, PathError> {
        Ok(match c {
            Cond::Lit(true) => Formula::True,
            Cond::Lit(false) => Formula::False,
            Cond::Cmp(r, a, b) => Formula::atom(*r, self.term(a)?, self.term(b)?),
            Cond::And(a, b) => Formula::and(alloc::vec![self.formula(a)?, self.formula(b)?]),
            Cond::Or(a, b) => Formula::or(alloc::vec![self.formula(a)?, self.formula(b)?]),
            Cond::Not(_) | Cond::Implies(..) | Cond::ForAll { .. } => unreachable!("not in normal form"),
        })
    }

    fn ce_equalities(&mut self, hard: &mut Vec<Formula>) {
        for v in self.cfg.vars.iter().filter(|v| v.kind == VarKind::Param) {
            let r = VarRef::new(&v.name, 0);
            if let Some(x) = self.val.scalars.get(&r).copied() {
                let t = self.scalar(&r);
                hard.push(Formula::eq(t, Term::Const(x)));
            } else if let Some(cells) = self.val.arrays.get(&r) {
                for (i, x) in cells.iter().enumerate() {
                    let t = self.cell(&r, i);
                    hard.push(Formula::eq(t, Term::Const(*x)));
                }
            }
        }
    }

    fn assign(&mut self, a: &Assign, hard: &mut Vec<Formula>, soft: &mut Vec<SoftConstraint>) -> Result<(), PathError> {
        match a {
            Assign::Scalar { target, value, loc } => {
                let rhs = self.term(value)?;
                let lhs = self.scalar(target);
                soft.push(SoftConstraint { formula: Formula::eq(lhs, rhs), origin: loc.clone(), text: a.to_string() });
            }
            Assign::Store { array, from, to, index, value, loc } => {
                let (from, to) = (VarRef::new(array, *from), VarRef::new(array, *to));
                let c = self.index(&from, index)?;
                let rhs = self.term(value)?;
                let lhs = self.cell(&to, c);
                soft.push(SoftConstraint {
                    formula: Formula::eq(lhs, rhs),
                    origin: loc.clone(),
                    text: format!("{to}[{c}] = {value}"),
                });
                for j in (0..self.len(array)).filter(|j| *j != c) {
                    let (x, y) = (self.cell(&to, j), self.cell(&from, j));
                    hard.push(Formula::eq(x, y));
                }
            }
            Assign::Copy { name, from, to, array } => {
                let (from, to) = (VarRef::new(name, *from), VarRef::new(name, *to));
                if *array {
                    for j in 0..self.len(name) {
                        let (x, y) = (self.cell(&to, j), self.cell(&from, j));
                        hard.push(Formula::eq(x, y));
                    }
                } else {
                    let (x, y) = (self.scalar(&to), self.scalar(&from));
                    hard.push(Formula::eq(x, y));
                }
            }
        }
        Ok(())
    }

    /// Hard copies and soft assignments of the path prefix `path`.
    fn blocks(&mut self, path: &[NodeId], hard: &mut Vec<Formula>, soft: &mut Vec<SoftConstraint>) -> Result<(), PathError> {
        for n in path {
            if let NodeKind::Block(assigns) = &self.cfg.nodes[*n].kind {
                self.node = *n;
                for a in assigns {
                    self.assign(a, hard, soft)?;
                }
            }
        }
        Ok(())
    }
}

fn clean(p: &Propagation) -> Result<(), PathError> {
    match &p.fault {
        Some(f) => Err(PathError::Fault(f.clone())),
        None => Ok(()),
    }
}

/// Constraint system of the counterexample path: hard counterexample values
/// and postcondition, soft assignments.
pub fn ce_path_csp(cfg: &Cfg, ce: &Counterexample, domain: Domain) -> Result<PathCsp, PathError> {
    let p = propagate(cfg, ce, &[])?;
    clean(&p)?;
    if p.post_holds {
        return Err(PathError::NotACounterexample);
    }
    let mut t = Translator { cfg, val: &p.valuation, vars: VarTable::new(), domain, node: cfg.entry };
    let (mut hard, mut soft) = (Vec::new(), Vec::new());
    t.ce_equalities(&mut hard);
    t.blocks(&p.path, &mut hard, &mut soft)?;
    let post = match &cfg.nodes[cfg.exit].kind {
        NodeKind::Post(c) => nnf(&expand_quantifiers(c)?, false),
        _ => unreachable!("exit node holds the postcondition"),
    };
    t.node = cfg.exit;
    hard.push(t.formula(&post)?);
    Ok(PathCsp { vars: t.vars, hard, soft })
}

/// Constraint system of the path reaching the last deviated condition:
/// hard counterexample values and the condition selecting the deviated
/// branch, soft assignments before that condition.
pub fn deviated_path_csp(cfg: &Cfg, ce: &Counterexample, deviations: &[NodeId], domain: Domain) -> Result<PathCsp, PathError> {
    let p = propagate(cfg, ce, deviations)?;
    let last = deviations
        .iter()
        .filter_map(|d| p.position(*d))
        .max()
        .ok_or(PathError::NoDeviation)?;
    let d = p.path[last];
    let mut t = Translator { cfg, val: &p.valuation, vars: VarTable::new(), domain, node: cfg.entry };
    let (mut hard, mut soft) = (Vec::new(), Vec::new());
    t.ce_equalities(&mut hard);
    t.blocks(&p.path[..last], &mut hard, &mut soft)?;
    let cond = match &cfg.nodes[d].kind {
        NodeKind::Cond(c) => flip(c, p.natural[&d]),
        _ => unreachable!("deviations are conditions"),
    };
    t.node = d;
    hard.push(t.formula(&cond)?);
    Ok(PathCsp { vars: t.vars, hard, soft })
}
