//! The localization driver.
//!
//! Steps `k = 0, 1, ..., b_dcm` run in order. Step 0 computes the MCSs of
//! the counterexample path. Step `k` walks the graph depth first, deviating
//! exactly `k` conditions, and computes MCSs for every deviation set that
//! makes the run satisfy the postcondition. With marking on, the last
//! condition of a correcting set of size `k` is marked `k`, and later steps
//! never deviate a condition whose mark is smaller than their size.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cfg::{build_cfg, to_dsa, unroll, Cfg, CfgError, NodeId};
use crate::frontend::{Type, ValidatedProgram};
use crate::input::{Counterexample, Value};
use crate::interp::{self, scan_order};
use crate::mcs::{enumerate_mcs, McsError};
use crate::pathgen::{ce_path_csp, deviated_path_csp, propagate, PathError, Propagation};
use crate::solver::Domain;
use crate::LocRef;

/// Condition node to the size of the correcting set it ended.
pub type Marks = BTreeMap<NodeId, usize>;

/// Deviated conditions in path order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeviationSet {
    pub conditions: Vec<NodeId>,
    pub corrected: bool,
}

impl DeviationSet {
    pub fn last(&self) -> Option<NodeId> {
        self.conditions.last().copied()
    }

    pub fn contains_all(&self, other: &DeviationSet) -> bool {
        other.conditions.iter().all(|c| self.conditions.contains(c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Largest number of deviated conditions.
    pub max_deviations: usize,
    /// Largest MCS size.
    pub max_mcs: usize,
    pub marking: bool,
    pub domain: Domain,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_deviations: 3, max_mcs: 3, marking: true, domain: Domain::default() }
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub nodes: Vec<NodeId>,
    pub deviation: Vec<LocRef>,
    pub corrected: bool,
    pub is_dcm: bool,
    pub mcss: Vec<Vec<LocRef>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub program: String,
    pub counterexample: Counterexample,
    pub unroll_bound: u32,
    pub options: Options,
    /// Entry 0 is the counterexample path itself.
    pub entries: Vec<Entry>,
    /// The counterexample path or a correcting path needed more loop
    /// iterations than were unrolled.
    pub unroll_insufficient: bool,
}

impl Report {
    pub fn dcms(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.is_dcm)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalizeError {
    NotACounterexample,
    PreconditionViolated,
    Cfg(CfgError),
    Path(PathError),
    Mcs(McsError),
    TooLarge(usize),
}

impl fmt::Display for LocalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalizeError::NotACounterexample => f.write_str("the input satisfies the postcondition"),
            LocalizeError::PreconditionViolated => f.write_str("the input violates the precondition"),
            LocalizeError::Cfg(e) => write!(f, "{e}"),
            LocalizeError::Path(e) => write!(f, "{e}"),
            LocalizeError::Mcs(e) => write!(f, "{e}"),
            LocalizeError::TooLarge(n) => write!(f, "{n} conditions exceed the exhaustive search limit"),
        }
    }
}

impl core::error::Error for LocalizeError {}

impl From<PathError> for LocalizeError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::NotACounterexample => LocalizeError::NotACounterexample,
            e => LocalizeError::Path(e),
        }
    }
}

impl From<McsError> for LocalizeError {
    fn from(e: McsError) -> Self {
        LocalizeError::Mcs(e)
    }
}

impl From<CfgError> for LocalizeError {
    fn from(e: CfgError) -> Self {
        LocalizeError::Cfg(e)
    }
}

/// Builds, unrolls `b` times and renames a program.
pub fn prepare(program: &ValidatedProgram, b: u32) -> Result<Cfg, CfgError> {
    to_dsa(&unroll(&build_cfg(program), b)?)
}

fn visit(
    cfg: &Cfg,
    ce: &Counterexample,
    k: usize,
    marks: Option<&Marks>,
    current: &mut Vec<NodeId>,
    run: &Propagation,
    out: &mut Vec<(DeviationSet, bool)>,
) -> Result<(), PathError> {
    if current.len() == k {
        out.push((DeviationSet { conditions: current.clone(), corrected: run.post_holds }, run.truncated));
        return Ok(());
    }
    let start = match current.last() {
        Some(d) => run.position(*d).map_or(run.path.len(), |p| p + 1),
        None => 0,
    };
    let candidates: Vec<NodeId> = run.path[start..].iter().copied().filter(|n| run.natural.contains_key(n)).collect();
    for c in candidates {
        if marks.is_some_and(|m| m.get(&c).is_some_and(|v| *v < k)) {
            continue;
        }
        current.push(c);
        let next = propagate(cfg, ce, current)?;
        visit(cfg, ce, k, marks, current, &next, out)?;
        current.pop();
    }
    Ok(())
}

/// Every reachable set of exactly `k` deviations, in depth-first order,
/// with whether its path hit an unrolling bound.
fn visited(cfg: &Cfg, ce: &Counterexample, k: usize, marks: Option<&Marks>) -> Result<Vec<(DeviationSet, bool)>, PathError> {
    let base = propagate(cfg, ce, &[])?;
    let mut out = Vec::new();
    visit(cfg, ce, k, marks, &mut Vec::new(), &base, &mut out)?;
    Ok(out)
}

/// The correcting sets of exactly `k` deviations. Conditions marked with a
/// value below `k` are never deviated.
pub fn explore_step(cfg: &Cfg, ce: &Counterexample, k: usize, marks: Option<&Marks>) -> Result<Vec<DeviationSet>, PathError> {
    Ok(visited(cfg, ce, k, marks)?.into_iter().map(|(d, _)| d).filter(|d| d.corrected).collect())
}

fn locs(cfg: &Cfg, nodes: &[NodeId]) -> Vec<LocRef> {
    nodes.iter().map(|n| cfg.nodes[*n].loc.clone()).collect()
}

/// Runs the full localization on a DSA graph.
pub fn localize(cfg: &Cfg, ce: &Counterexample, opts: &Options) -> Result<Report, LocalizeError> {
    let b = match cfg.stage {
        crate::cfg::Stage::Dsa(b) => b,
        s => return Err(LocalizeError::Path(PathError::WrongStage(s))),
    };
    let base = propagate(cfg, ce, &[])?;
    if let Some(f) = base.fault {
        return Err(LocalizeError::Path(PathError::Fault(f)));
    }
    if !base.pre_holds {
        return Err(LocalizeError::PreconditionViolated);
    }
    if base.post_holds {
        return Err(LocalizeError::NotACounterexample);
    }
    let mut truncated = base.truncated;
    let csp = ce_path_csp(cfg, ce, opts.domain)?;
    let mcss = enumerate_mcs(&csp, opts.max_mcs)?;
    let mut entries = vec![Entry {
        nodes: Vec::new(),
        deviation: Vec::new(),
        corrected: false,
        is_dcm: false,
        mcss: mcss.into_iter().map(|m| m.origins).collect(),
    }];

    let mut marks = Marks::new();
    let mut correcting: Vec<DeviationSet> = Vec::new();
    for k in 1..=opts.max_deviations {
        let sets = visited(cfg, ce, k, opts.marking.then_some(&marks))?;
        let mut newly = Vec::new();
        for (set, hit_bound) in sets {
            let mut entry = Entry {
                deviation: locs(cfg, &set.conditions),
                nodes: set.conditions.clone(),
                corrected: set.corrected,
                is_dcm: false,
                mcss: Vec::new(),
            };
            if set.corrected {
                truncated |= hit_bound;
                entry.is_dcm = !correcting.iter().any(|c| set.contains_all(c));
                let csp = deviated_path_csp(cfg, ce, &set.conditions, opts.domain)?;
                entry.mcss = enumerate_mcs(&csp, opts.max_mcs)?.into_iter().map(|m| m.origins).collect();
                newly.push(set);
            }
            entries.push(entry);
        }
        for set in &newly {
            if let Some(last) = set.last() {
                marks.entry(last).or_insert(k);
            }
        }
        correcting.extend(newly);
    }

    Ok(Report {
        program: cfg.name.clone(),
        counterexample: ce.clone(),
        unroll_bound: b,
        options: *opts,
        entries,
        unroll_insufficient: truncated,
    })
}

/// Largest condition count [`brute_force_dcm`] accepts.
pub const BRUTE_FORCE_CONDITIONS: usize = 16;

/// All minimal correcting deviation sets of at most `k_max` conditions,
/// found by checking every subset of condition nodes.
pub fn brute_force_dcm(cfg: &Cfg, ce: &Counterexample, k_max: usize) -> Result<Vec<DeviationSet>, LocalizeError> {
    let conds = cfg.condition_nodes();
    if conds.len() > BRUTE_FORCE_CONDITIONS {
        return Err(LocalizeError::TooLarge(conds.len()));
    }
    let mut subsets: Vec<u32> = (1u32..(1 << conds.len())).filter(|m| m.count_ones() as usize <= k_max).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<DeviationSet> = Vec::new();
    for mask in subsets {
        let chosen: Vec<NodeId> = (0..conds.len()).filter(|i| mask & (1 << i) != 0).map(|i| conds[i]).collect();
        let run = match propagate(cfg, ce, &chosen) {
            Ok(r) => r,
            Err(PathError::DeviationOffPath(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        if !run.post_holds {
            continue;
        }
        let mut ordered = chosen;
        ordered.sort_by_key(|n| run.position(*n));
        let set = DeviationSet { conditions: ordered, corrected: true };
        if !found.iter().any(|f| set.contains_all(f)) {
            found.push(set);
        }
    }
    Ok(found)
}

/// Scans inputs with every scalar and array cell in `range`, small
/// magnitudes first, and returns the first one that satisfies the
/// precondition but violates the postcondition with loops bounded by `b`.
/// At most `budget` inputs are run.
pub fn find_counterexample(program: &ValidatedProgram, b: u32, budget: usize, range: Domain) -> Option<Counterexample> {
    let p = program.program();
    let mut dims = Vec::new();
    for d in &p.params {
        match d.ty {
            Type::Int => dims.push((d.name.clone(), None)),
            Type::Array(_) => {
                let n = program.array_len(&d.name).unwrap_or(0);
                dims.extend((0..n).map(|i| (d.name.clone(), Some(i))));
            }
        }
    }
    let values = scan_order(range.lo, range.hi);
    let mut tried = 0;
    for shell in 0..values.len() {
        // Tuples of positions in `values` whose largest position is `shell`.
        let mut pos = vec![0usize; dims.len()];
        loop {
            if dims.is_empty() || pos.contains(&shell) {
                if tried == budget {
                    return None;
                }
                tried += 1;
                let ce = build_input(program, &dims, &pos, &values);
                if let Ok(run) = interp::run(program, &ce, Some(b)) {
                    if run.pre_holds && !run.post_holds {
                        return Some(ce);
                    }
                }
            }
            let Some(i) = (0..dims.len()).find(|i| pos[*i] < shell) else { break };
            pos[i] += 1;
            for p in &mut pos[..i] {
                *p = 0;
            }
        }
        if dims.is_empty() {
            break;
        }
    }
    None
}

fn build_input(program: &ValidatedProgram, dims: &[(String, Option<usize>)], pos: &[usize], values: &[i64]) -> Counterexample {
    let mut ce = Counterexample::new();
    for d in &program.program().params {
        if let Some(n) = program.array_len(&d.name).filter(|_| d.ty != Type::Int) {
            ce = ce.with(&d.name, Value::Array(vec![0; n]));
        }
    }
    for ((name, cell), p) in dims.iter().zip(pos) {
        let v = values[*p];
        match cell {
            None => ce = ce.with(name, Value::Int(v)),
            Some(i) => {
                if let Some(Value::Array(cells)) = ce.bindings.get_mut(name) {
                    cells[*i] = v;
                }
            }
        }
    }
    ce
}

#[cfg(test)]
mod tests;
