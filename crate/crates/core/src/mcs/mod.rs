//! Minimal correction subsets of a path constraint system.
//!
//! [`enumerate_mcs`] relaxes the soft constraints through indicators and
//! grows a cardinality bound, blocking every subset found so that each
//! later solution is minimal. [`brute_force_mcs`] checks every subset and
//! serves as an oracle.

use alloc::vec::Vec;
use core::fmt;

use crate::pathgen::PathCsp;
use crate::solver::{solve, BlockingClause, SolveResult, SolverError};
use crate::LocRef;

/// Indices into the soft list of a [`PathCsp`], ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mcs {
    pub members: Vec<usize>,
    pub origins: Vec<LocRef>,
}

impl Mcs {
    fn new(csp: &PathCsp, mut members: Vec<usize>) -> Mcs {
        members.sort_unstable();
        let origins = members.iter().map(|i| csp.soft[*i].origin.clone()).collect();
        Mcs { members, origins }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset_of(&self, other: &Mcs) -> bool {
        self.members.iter().all(|m| other.members.contains(m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McsError {
    /// Hard and soft constraints together are satisfiable.
    FeasibleInput,
    /// Too many soft constraints for exhaustive search.
    TooLarge(usize),
    Solver(SolverError),
}

impl fmt::Display for McsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McsError::FeasibleInput => f.write_str("constraint system is satisfiable; nothing to correct"),
            McsError::TooLarge(n) => write!(f, "{n} soft constraints exceed the exhaustive search limit"),
            McsError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for McsError {}

impl From<SolverError> for McsError {
    fn from(e: SolverError) -> Self {
        McsError::Solver(e)
    }
}

/// Soft-set size above which [`brute_force_mcs`] refuses to run.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Requires at least one member of `mcs` to stay active.
pub fn blocking_clause(mcs: &Mcs) -> BlockingClause {
    BlockingClause(mcs.members.clone())
}

fn feasible_without(csp: &PathCsp, removed: &[usize]) -> Result<bool, SolverError> {
    Ok(solve(&csp.without(removed))?.is_sat())
}

/// All MCSs of at most `bound` members, by nondecreasing size and in soft
/// order within a size.
pub fn enumerate_mcs(csp: &PathCsp, bound: usize) -> Result<Vec<Mcs>, McsError> {
    if feasible_without(csp, &[])? {
        return Err(McsError::FeasibleInput);
    }
    let mut relaxable = csp.csp();
    let mut found = Vec::new();
    let mut k = 1;
    while k <= bound && solve(&relaxable)?.is_sat() {
        let mut step = relaxable.with_at_most(k);
        let mut batch = Vec::new();
        while let SolveResult::Sat(a) = solve(&step)? {
            let mcs = Mcs::new(csp, a.relaxed());
            debug_assert!(!mcs.is_empty());
            step.add_clause(blocking_clause(&mcs));
            relaxable.add_clause(blocking_clause(&mcs));
            batch.push(mcs);
        }
        batch.sort();
        found.extend(batch);
        k += 1;
    }
    Ok(found)
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> Result<(), McsError>) -> Result<(), McsError> {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return Ok(());
    }
    loop {
        f(&idx)?;
        let Some(i) = (0..k).rev().find(|i| idx[*i] < n - k + i) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// MCSs of at most `bound` members found by checking every subset of the
/// soft constraints, smallest first.
pub fn brute_force_mcs(csp: &PathCsp, bound: usize) -> Result<Vec<Mcs>, McsError> {
    let n = csp.soft.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(McsError::TooLarge(n));
    }
    if feasible_without(csp, &[])? {
        return Err(McsError::FeasibleInput);
    }
    let mut found: Vec<Mcs> = Vec::new();
    for size in 1..=bound.min(n) {
        combinations(n, size, &mut |s| {
            let candidate = Mcs::new(csp, s.to_vec());
            if !found.iter().any(|m| m.is_subset_of(&candidate)) && feasible_without(csp, s)? {
                found.push(candidate);
            }
            Ok(())
        })?;
    }
    Ok(found)
}

/// Checks the definition directly: removing `mcs` restores feasibility and
/// removing any proper subset of it does not.
pub fn verify_mcs(csp: &PathCsp, mcs: &Mcs) -> Result<bool, SolverError> {
    if mcs.is_empty() || !feasible_without(csp, &mcs.members)? {
        return Ok(false);
    }
    let m = mcs.len();
    for mask in 0..(1u32 << m) - 1 {
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| mcs.members[i]).collect();
        if feasible_without(csp, &subset)? {
            return Ok(false);
        }
    }
    Ok(true)
}
