//! Propagate-and-branch search.

use alloc::vec;
use alloc::vec::Vec;

use super::normalize::simplify;
use super::interval::{open_disjunction, propagate, truth, Iv, Stop, Store, Truth};
use super::eliminate::{eliminate, eval};
use super::{Assignment, Csp, Domain, Formula, SolveResult, SolverError, VarId};

/// Cap on propagation sweeps per search node; search stays complete past it.
const MAX_SWEEPS: usize = 512;
/// Domains at most this wide are enumerated value by value.
const ENUMERATE_WIDTH: i64 = 4;

struct Engine<'a> {
    csp: &'a Csp,
    n: usize,
    /// Set for the subproblems built by `solve_fixed`.
    presolved: bool,
}

pub(crate) fn run(csp: &Csp) -> Result<SolveResult, SolverError> {
    let mut normal = csp.clone();
    (normal.hard, normal.indicators) = simplify(&csp.hard, &csp.indicators);
    let csp = &normal;
    let n = csp.vars.len();
    let m = csp.indicators.len();
    let mut lo = Vec::with_capacity(n + m);
    let mut hi = Vec::with_capacity(n + m);
    for v in csp.vars.ids() {
        let d = csp.vars.domain(v);
        if d.is_empty() {
            return Ok(SolveResult::Unsat);
        }
        lo.push(d.lo);
        hi.push(d.hi);
    }
    lo.extend(core::iter::repeat_n(0, m));
    hi.extend(core::iter::repeat_n(1, m));
    let store = Store { lo, hi, changes: 0 };
    let engine = Engine { csp, n, presolved: false };
    match engine.search(store, Vec::new()) {
        Ok(Some(a)) => Ok(SolveResult::Sat(a)),
        Ok(None) => Ok(SolveResult::Unsat),
        Err(Stop::Overflow) => Err(SolverError::DomainOverflow),
        Err(Stop::Fail) => Ok(SolveResult::Unsat),
    }
}

impl<'a> Engine<'a> {
    fn y(&self, i: usize) -> usize {
        self.n + i
    }

    fn sweep(&self, st: &mut Store, extra: &[&'a Formula]) -> Result<(), Stop> {
        for f in &self.csp.hard {
            propagate(f, st)?;
        }
        for f in extra {
            propagate(f, st)?;
        }
        for (i, f) in self.csp.indicators.iter().enumerate() {
            let y = self.y(i);
            if st.lo[y] == 1 {
                propagate(f, st)?;
            } else if st.hi[y] == 1 && truth(f, st)? == Truth::False {
                st.fix(y, 0)?;
            }
        }
        if let Some(k) = self.csp.at_most {
            let m = self.csp.indicators.len();
            let zeros = (0..m).filter(|i| st.hi[self.y(*i)] == 0).count();
            if zeros > k {
                return Err(Stop::Fail);
            }
            if zeros == k {
                for i in 0..m {
                    let y = self.y(i);
                    if !st.is_fixed(y) {
                        st.fix(y, 1)?;
                    }
                }
            }
        }
        for clause in &self.csp.clauses {
            let ys = &clause.0;
            if ys.iter().any(|i| st.lo[self.y(*i)] == 1) {
                continue;
            }
            let mut open = ys.iter().filter(|i| st.hi[self.y(**i)] == 1);
            match (open.next(), open.next()) {
                (None, _) => return Err(Stop::Fail),
                (Some(i), None) => st.fix(self.y(*i), 1)?,
                _ => {}
            }
        }
        Ok(())
    }

    fn fixpoint(&self, st: &mut Store, extra: &[&'a Formula]) -> Result<(), Stop> {
        for _ in 0..MAX_SWEEPS {
            let before = st.changes;
            self.sweep(st, extra)?;
            if st.changes == before {
                break;
            }
        }
        Ok(())
    }

    /// Every point of the current box is a solution (indicators aside,
    /// which are read off by `witness`).
    fn entailed(&self, st: &Store, extra: &[&'a Formula]) -> Result<bool, Stop> {
        for f in self.csp.hard.iter().chain(extra.iter().copied()) {
            if truth(f, st)? != Truth::True {
                return Ok(false);
            }
        }
        for (i, f) in self.csp.indicators.iter().enumerate() {
            if st.hi[self.y(i)] == 1 && st.lo[self.y(i)] == 1 && truth(f, st)? != Truth::True {
                return Ok(false);
            }
        }
        let ones = self.witness_indicators(st)?;
        if let Some(k) = self.csp.at_most {
            if ones.iter().filter(|y| !**y).count() > k {
                return Ok(false);
            }
        }
        Ok(self.csp.clauses.iter().all(|c| c.0.iter().any(|i| ones[*i])))
    }

    /// An open indicator is set when its formula is entailed, cleared otherwise.
    fn witness_indicators(&self, st: &Store) -> Result<Vec<bool>, Stop> {
        let mut out = vec![false; self.csp.indicators.len()];
        for (i, f) in self.csp.indicators.iter().enumerate() {
            let y = self.y(i);
            out[i] = if st.is_fixed(y) {
                st.lo[y] == 1
            } else {
                truth(f, st)? == Truth::True
            };
        }
        Ok(out)
    }

    fn search(&self, mut st: Store, extra: Vec<&'a Formula>) -> Result<Option<Assignment>, Stop> {
        match self.fixpoint(&mut st, &extra) {
            Err(Stop::Fail) => return Ok(None),
            other => other?,
        }
        if self.entailed(&st, &extra)? {
            let indicators = self.witness_indicators(&st)?;
            return Ok(Some(Assignment { values: st.lo[..self.n].to_vec(), indicators }));
        }
        let m = self.csp.indicators.len();
        if !self.presolved && (0..m).all(|i| st.is_fixed(self.y(i))) {
            return self.solve_fixed(&st, &extra);
        }
        let pick = (0..st.lo.len())
            .filter(|v| !st.is_fixed(*v))
            .min_by_key(|v| (st.hi[*v] as i128 - st.lo[*v] as i128, *v));
        let Some(v) = pick else {
            return Ok(None);
        };
        let width = st.hi[v] as i128 - st.lo[v] as i128;
        if width >= 2 {
            if let Some(ds) = self.open_disjunction(&st, &extra)? {
                for d in ds {
                    let mut e = extra.clone();
                    e.push(d);
                    if let Some(a) = self.search(st.clone(), e)? {
                        return Ok(Some(a));
                    }
                }
                return Ok(None);
            }
        }
        if width < ENUMERATE_WIDTH as i128 {
            for value in st.lo[v]..=st.hi[v] {
                let mut s = st.clone();
                s.fix(v, value).ok();
                if let Some(a) = self.search(s, extra.clone())? {
                    return Ok(Some(a));
                }
            }
            return Ok(None);
        }
        // Halves nearer zero first; a range across zero splits at zero.
        let (lo, hi) = (st.lo[v] as i128, st.hi[v] as i128);
        let halves = if lo < 0 && hi > 0 {
            [Iv { lo: 0, hi }, Iv { lo, hi: -1 }]
        } else {
            let mid = lo + (hi - lo).div_euclid(2);
            let (low, high) = (Iv { lo, hi: mid }, Iv { lo: mid + 1, hi });
            if hi <= 0 { [high, low] } else { [low, high] }
        };
        for half in halves {
            let mut s = st.clone();
            s.narrow(v, half).ok();
            if let Some(a) = self.search(s, extra.clone())? {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    /// Solves the problem left once every indicator is decided, after
    /// eliminating the variables that equalities define.
    fn solve_fixed(&self, st: &Store, extra: &[&'a Formula]) -> Result<Option<Assignment>, Stop> {
        let mut fs: Vec<Formula> = self.csp.hard.iter().chain(extra.iter().copied()).cloned().collect();
        for (i, f) in self.csp.indicators.iter().enumerate() {
            if st.lo[self.y(i)] == 1 {
                fs.push(f.clone());
            }
        }
        let bounds: Vec<(i64, i64)> = (0..self.n).map(|v| (st.lo[v], st.hi[v])).collect();
        let elim = eliminate(fs, &bounds);
        if elim.formulas.contains(&Formula::False) {
            return Ok(None);
        }
        let mut vars = self.csp.vars.clone();
        for (v, (lo, hi)) in bounds.iter().enumerate() {
            vars.set_domain(VarId(v as u32), Domain::new(*lo, *hi));
        }
        let mut used = Vec::new();
        for f in &elim.formulas {
            f.collect_vars(&mut used);
        }
        for v in 0..self.n {
            if !used.contains(&VarId(v as u32)) {
                vars.set_domain(VarId(v as u32), Domain::new(st.lo[v], st.lo[v]));
            }
        }
        let sub = Csp::new(vars.clone(), elim.formulas);
        let engine = Engine { csp: &sub, n: self.n, presolved: true };
        let lo: Vec<i64> = (0..self.n).map(|v| vars.domain(VarId(v as u32)).lo).collect();
        let hi: Vec<i64> = (0..self.n).map(|v| vars.domain(VarId(v as u32)).hi).collect();
        let store = Store { lo, hi, changes: 0 };
        let Some(mut a) = engine.search(store, Vec::new())? else {
            return Ok(None);
        };
        for (x, def) in elim.defs.iter().rev() {
            a.values[*x as usize] = eval(def, &a.values).ok_or(Stop::Overflow)?;
        }
        a.indicators = (0..self.csp.indicators.len()).map(|i| st.lo[self.y(i)] == 1).collect();
        Ok(Some(a))
    }

    /// First open disjunction that has not already been split on this branch.
    fn open_disjunction(&self, st: &Store, extra: &[&'a Formula]) -> Result<Option<&'a [Formula]>, Stop> {
        let split = |ds: &[Formula]| extra.iter().any(|e| ds.iter().any(|d| core::ptr::eq(*e, d)));
        for f in self.csp.hard.iter().chain(extra.iter().copied()) {
            if let Some(d) = open_disjunction(f, st, &split)? {
                return Ok(Some(d));
            }
        }
        for (i, f) in self.csp.indicators.iter().enumerate() {
            if st.lo[self.y(i)] == 1 {
                if let Some(d) = open_disjunction(f, st, &split)? {
                    return Ok(Some(d));
                }
            }
        }
        Ok(None)
    }
}
