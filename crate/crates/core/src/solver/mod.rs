//! Bounded-integer constraint solver.
//!
//! Problems are conjunctions of NNF formulas over integer variables with
//! finite domains, plus optional reified indicators `y_i -> c_i`, an
//! at-most-k cardinality constraint on indicators set to false, and blocking
//! clauses over indicators. The engine combines interval propagation with
//! depth-first search and is complete on bounded domains.

mod eliminate;
mod eval;
mod interval;
mod normalize;
mod search;
mod term;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use eval::{eval_formula, eval_term, satisfies};
pub use term::{Formula, Rel, Term};

/// Index of an integer variable in a [`VarTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    pub lo: i64,
    pub hi: i64,
}

impl Domain {
    pub const fn new(lo: i64, hi: i64) -> Self {
        Domain { lo, hi }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

impl Default for Domain {
    /// Signed 16-bit range.
    fn default() -> Self {
        Domain::new(-32768, 32767)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Named integer variables and their domains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    domains: Vec<Domain>,
    by_name: BTreeMap<String, VarId>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the existing id if `name` is already declared.
    pub fn declare(&mut self, name: &str, domain: Domain) -> VarId {
        if let Some(id) = self.by_name.get(name) {
            return *id;
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(String::from(name));
        self.domains.push(domain);
        self.by_name.insert(String::from(name), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id.index()]
    }

    pub fn domain(&self, id: VarId) -> Domain {
        self.domains[id.index()]
    }

    pub fn set_domain(&mut self, id: VarId, domain: Domain) {
        self.domains[id.index()] = domain;
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }
}

/// Whether any constraint multiplies two non-constant terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemClass {
    Linear,
    NonLinear,
}

/// Disjunction `y_{i1} \/ ... \/ y_{in}` over indicator indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockingClause(pub Vec<usize>);

/// A constraint satisfaction problem.
#[derive(Clone, Debug)]
pub struct Csp {
    pub vars: VarTable,
    pub hard: Vec<Formula>,
    /// `indicators[i]` is the formula guarded by `y_i`.
    pub indicators: Vec<Formula>,
    /// Upper bound on the number of indicators set to false.
    pub at_most: Option<usize>,
    pub clauses: Vec<BlockingClause>,
    pub class: ProblemClass,
}

impl Csp {
    pub fn new(vars: VarTable, hard: Vec<Formula>) -> Self {
        let mut csp = Csp {
            vars,
            hard,
            indicators: Vec::new(),
            at_most: None,
            clauses: Vec::new(),
            class: ProblemClass::Linear,
        };
        csp.class = csp.classify();
        csp
    }

    fn classify(&self) -> ProblemClass {
        let nonlinear = self
            .hard
            .iter()
            .chain(self.indicators.iter())
            .any(Formula::is_nonlinear);
        if nonlinear {
            ProblemClass::NonLinear
        } else {
            ProblemClass::Linear
        }
    }

    pub fn with_at_most(&self, k: usize) -> Csp {
        let mut c = self.clone();
        c.at_most = Some(k);
        c
    }

    pub fn without_at_most(&self) -> Csp {
        let mut c = self.clone();
        c.at_most = None;
        c
    }

    pub fn add_clause(&mut self, clause: BlockingClause) {
        self.clauses.push(clause);
    }
}

/// Builds the relaxable problem: every soft constraint `c_i` becomes
/// `y_i -> c_i` for a fresh boolean indicator `y_i`.
pub fn add_y_vars(vars: VarTable, hard: Vec<Formula>, soft: Vec<Formula>) -> Csp {
    let mut csp = Csp::new(vars, hard);
    csp.indicators = soft;
    csp.class = csp.classify();
    csp
}

/// Copy of `csp` constrained so that at most `k` indicators are false.
pub fn with_at_most(csp: &Csp, k: usize) -> Csp {
    csp.with_at_most(k)
}

/// A satisfying assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<i64>,
    pub indicators: Vec<bool>,
}

impl Assignment {
    pub fn value(&self, v: VarId) -> i64 {
        self.values[v.index()]
    }

    /// Indices of indicators set to false.
    pub fn relaxed(&self) -> Vec<usize> {
        self.indicators
            .iter()
            .enumerate()
            .filter(|(_, y)| !**y)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverError {
    /// An intermediate value left the range the engine can represent.
    DomainOverflow,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::DomainOverflow => f.write_str("arithmetic overflow in constraint evaluation"),
        }
    }
}

impl core::error::Error for SolverError {}

/// Decides satisfiability. A returned assignment always satisfies every
/// constraint of `csp`.
pub fn solve(csp: &Csp) -> Result<SolveResult, SolverError> {
    // Both classes share one engine; products only tighten less.
    match csp.class {
        ProblemClass::Linear => search::run(csp),
        ProblemClass::NonLinear => search::run(csp),
    }
}

/// Satisfiability of the hard constraints plus the given formulas, ignoring
/// indicators and cardinality.
pub fn is_sat(vars: &VarTable, formulas: &[&Formula]) -> Result<bool, SolverError> {
    let hard = formulas.iter().map(|f| (*f).clone()).collect();
    Ok(solve(&Csp::new(vars.clone(), hard))?.is_sat())
}

#[cfg(test)]
mod tests;
