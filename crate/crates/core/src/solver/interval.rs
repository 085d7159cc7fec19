//! Interval arithmetic and HC4-style revision of atoms.

use super::{Formula, Rel, Term};
use alloc::vec::Vec;

/// Magnitude standing in for an unbounded side of a target interval.
pub(crate) const INF: i128 = 1 << 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Iv {
    pub lo: i128,
    pub hi: i128,
}

/// Why propagation stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    Fail,
    Overflow,
}

fn clamp(v: i128) -> i128 {
    v.clamp(-INF, INF)
}

impl Iv {
    pub fn new(lo: i128, hi: i128) -> Iv {
        Iv { lo: clamp(lo), hi: clamp(hi) }
    }

    pub fn point(v: i128) -> Iv {
        Iv::new(v, v)
    }

    pub fn contains(&self, v: i128) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn meet(&self, o: Iv) -> Option<Iv> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Iv { lo, hi })
    }

    pub fn add(&self, o: Iv) -> Iv {
        Iv::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(&self, o: Iv) -> Iv {
        Iv::new(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(&self) -> Iv {
        Iv::new(-self.hi, -self.lo)
    }

    /// Exact product; fails only when a corner is beyond `INF`.
    pub fn mul(&self, o: Iv) -> Result<Iv, Stop> {
        let corners = [
            self.lo.checked_mul(o.lo),
            self.lo.checked_mul(o.hi),
            self.hi.checked_mul(o.lo),
            self.hi.checked_mul(o.hi),
        ];
        let mut lo = i128::MAX;
        let mut hi = i128::MIN;
        for c in corners {
            let c = c.ok_or(Stop::Overflow)?;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        if lo < -INF || hi > INF {
            return Err(Stop::Overflow);
        }
        Ok(Iv { lo, hi })
    }

    /// Integer hull of `{ x | x * b in self for some b in d }` when `0 ∉ d`.
    pub fn div(&self, d: Iv) -> Option<Iv> {
        if d.contains(0) {
            return None;
        }
        let mut lo = i128::MAX;
        let mut hi = i128::MIN;
        for t in [self.lo, self.hi] {
            for b in [d.lo, d.hi] {
                lo = lo.min(div_ceil(t, b));
                hi = hi.max(div_floor(t, b));
            }
        }
        Some(Iv::new(lo, hi))
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Largest `r` with `r * r <= n`, for `n >= 0`.
fn isqrt_floor(n: i128) -> i128 {
    let (mut lo, mut hi) = (0i128, 1i128 << 52);
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if mid * mid <= n {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Smallest `r >= 0` with `r * r >= n`.
fn isqrt_ceil(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let r = isqrt_floor(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Variable bounds during search. Indicators are stored after the integer
/// variables with domain `[0, 1]`.
#[derive(Clone, Debug)]
pub(crate) struct Store {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub changes: u64,
}

impl Store {
    pub fn get(&self, v: usize) -> Iv {
        Iv { lo: self.lo[v] as i128, hi: self.hi[v] as i128 }
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.lo[v] == self.hi[v]
    }

    pub fn narrow(&mut self, v: usize, t: Iv) -> Result<(), Stop> {
        let cur = self.get(v);
        let n = cur.meet(t).ok_or(Stop::Fail)?;
        if n != cur {
            self.lo[v] = n.lo as i64;
            self.hi[v] = n.hi as i64;
            self.changes += 1;
        }
        Ok(())
    }

    pub fn fix(&mut self, v: usize, value: i64) -> Result<(), Stop> {
        self.narrow(v, Iv::point(value as i128))
    }
}

pub(crate) fn forward(t: &Term, st: &Store) -> Result<Iv, Stop> {
    match t {
        Term::Const(c) => Ok(Iv::point(*c as i128)),
        Term::Var(v) => Ok(st.get(v.index())),
        Term::Neg(a) => Ok(forward(a, st)?.neg()),
        Term::Add(a, b) => checked(forward(a, st)?.add(forward(b, st)?)),
        Term::Sub(a, b) => checked(forward(a, st)?.sub(forward(b, st)?)),
        Term::Mul(a, b) => {
            if let (Term::Var(x), Term::Var(y)) = (&**a, &**b) {
                if x == y {
                    let i = st.get(x.index());
                    let sq = i.mul(i)?;
                    let lo = if i.contains(0) { 0 } else { sq.lo.max(0) };
                    return Ok(Iv::new(lo, sq.hi));
                }
            }
            forward(a, st)?.mul(forward(b, st)?)
        }
    }
}

fn checked(i: Iv) -> Result<Iv, Stop> {
    if i.lo <= -INF || i.hi >= INF {
        Err(Stop::Overflow)
    } else {
        Ok(i)
    }
}

/// Narrows the variables of `t` so that its value can lie in `target`.
pub(crate) fn backward(t: &Term, target: Iv, st: &mut Store) -> Result<(), Stop> {
    match t {
        Term::Const(c) => {
            if target.contains(*c as i128) {
                Ok(())
            } else {
                Err(Stop::Fail)
            }
        }
        Term::Var(v) => st.narrow(v.index(), target),
        Term::Neg(a) => backward(a, target.neg(), st),
        Term::Add(a, b) => {
            let ib = forward(b, st)?;
            let ta = target.sub(ib).meet(forward(a, st)?).ok_or(Stop::Fail)?;
            backward(a, ta, st)?;
            let ia = forward(a, st)?;
            let tb = target.sub(ia).meet(forward(b, st)?).ok_or(Stop::Fail)?;
            backward(b, tb, st)
        }
        Term::Sub(a, b) => {
            let ib = forward(b, st)?;
            let ta = target.add(ib).meet(forward(a, st)?).ok_or(Stop::Fail)?;
            backward(a, ta, st)?;
            let ia = forward(a, st)?;
            let tb = ia.sub(target).meet(forward(b, st)?).ok_or(Stop::Fail)?;
            backward(b, tb, st)
        }
        Term::Mul(a, b) => {
            if let (Term::Var(x), Term::Var(y)) = (&**a, &**b) {
                if x == y {
                    return backward_square(x.index(), target, st);
                }
            }
            let ia = forward(a, st)?;
            let ib = forward(b, st)?;
            forward(t, st)?.meet(target).ok_or(Stop::Fail)?;
            if let Some(q) = target.div(ib) {
                backward(a, q.meet(ia).ok_or(Stop::Fail)?, st)?;
            } else if !target.contains(0) {
                backward(a, exclude_zero(ia).ok_or(Stop::Fail)?, st)?;
            }
            let ia = forward(a, st)?;
            if let Some(q) = target.div(ia) {
                backward(b, q.meet(ib).ok_or(Stop::Fail)?, st)?;
            } else if !target.contains(0) {
                backward(b, exclude_zero(ib).ok_or(Stop::Fail)?, st)?;
            }
            Ok(())
        }
    }
}

fn exclude_zero(i: Iv) -> Option<Iv> {
    let lo = if i.lo == 0 { 1 } else { i.lo };
    let hi = if i.hi == 0 { -1 } else { i.hi };
    (lo <= hi).then_some(Iv { lo, hi })
}

fn backward_square(x: usize, target: Iv, st: &mut Store) -> Result<(), Stop> {
    let t = target.meet(Iv::new(0, INF)).ok_or(Stop::Fail)?;
    let s = isqrt_floor(t.hi);
    let r = isqrt_ceil(t.lo);
    let cur = st.get(x);
    let mut n = cur.meet(Iv::new(-s, s)).ok_or(Stop::Fail)?;
    if r > 0 {
        if n.lo > -r {
            n.lo = n.lo.max(r);
        }
        if n.hi < r {
            n.hi = n.hi.min(-r);
        }
        if n.lo > n.hi {
            return Err(Stop::Fail);
        }
    }
    st.narrow(x, n)
}

/// Allowed values of `a - b` for `a rel b`, given the current difference.
fn rel_target(rel: Rel, diff: Iv) -> Option<Iv> {
    match rel {
        Rel::Eq => Some(Iv::point(0)),
        Rel::Lt => Some(Iv::new(-INF, -1)),
        Rel::Le => Some(Iv::new(-INF, 0)),
        Rel::Gt => Some(Iv::new(1, INF)),
        Rel::Ge => Some(Iv::new(0, INF)),
        Rel::Ne => {
            if diff.lo == 0 {
                Some(Iv::new(1, INF))
            } else if diff.hi == 0 {
                Some(Iv::new(-INF, -1))
            } else {
                None
            }
        }
    }
}

pub(crate) fn revise(rel: Rel, a: &Term, b: &Term, st: &mut Store) -> Result<(), Stop> {
    let ia = forward(a, st)?;
    let ib = forward(b, st)?;
    let diff = ia.sub(ib);
    if rel == Rel::Ne && diff.lo == 0 && diff.hi == 0 {
        return Err(Stop::Fail);
    }
    let Some(target) = rel_target(rel, diff) else {
        return Ok(());
    };
    diff.meet(target).ok_or(Stop::Fail)?;
    let ta = target.add(ib).meet(ia).ok_or(Stop::Fail)?;
    backward(a, ta, st)?;
    let ia = forward(a, st)?;
    let tb = ia.sub(target).meet(ib).ok_or(Stop::Fail)?;
    backward(b, tb, st)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Truth {
    True,
    False,
    Unknown,
}

fn atom_truth(rel: Rel, d: Iv) -> Truth {
    let (t, f) = match rel {
        Rel::Eq => (d.lo == 0 && d.hi == 0, !d.contains(0)),
        Rel::Ne => (!d.contains(0), d.lo == 0 && d.hi == 0),
        Rel::Lt => (d.hi < 0, d.lo >= 0),
        Rel::Le => (d.hi <= 0, d.lo > 0),
        Rel::Gt => (d.lo > 0, d.hi <= 0),
        Rel::Ge => (d.lo >= 0, d.hi < 0),
    };
    if t {
        Truth::True
    } else if f {
        Truth::False
    } else {
        Truth::Unknown
    }
}

pub(crate) fn truth(f: &Formula, st: &Store) -> Result<Truth, Stop> {
    match f {
        Formula::True => Ok(Truth::True),
        Formula::False => Ok(Truth::False),
        Formula::Atom(r, a, b) => Ok(atom_truth(*r, forward(a, st)?.sub(forward(b, st)?))),
        Formula::And(ps) => {
            let mut all = true;
            for p in ps {
                match truth(p, st)? {
                    Truth::False => return Ok(Truth::False),
                    Truth::Unknown => all = false,
                    Truth::True => {}
                }
            }
            Ok(if all { Truth::True } else { Truth::Unknown })
        }
        Formula::Or(ps) => {
            let mut none = true;
            for p in ps {
                match truth(p, st)? {
                    Truth::True => return Ok(Truth::True),
                    Truth::Unknown => none = false,
                    Truth::False => {}
                }
            }
            Ok(if none { Truth::False } else { Truth::Unknown })
        }
    }
}

/// Propagates `f` as a required constraint.
pub(crate) fn propagate(f: &Formula, st: &mut Store) -> Result<(), Stop> {
    match f {
        Formula::True => Ok(()),
        Formula::False => Err(Stop::Fail),
        Formula::Atom(r, a, b) => revise(*r, a, b, st),
        Formula::And(ps) => {
            for p in ps {
                propagate(p, st)?;
            }
            Ok(())
        }
        Formula::Or(ps) => {
            let mut alive = None;
            let mut count = 0;
            for p in ps {
                match truth(p, st)? {
                    Truth::True => return Ok(()),
                    Truth::False => {}
                    Truth::Unknown => {
                        count += 1;
                        alive = Some(p);
                    }
                }
            }
            match (count, alive) {
                (0, _) => Err(Stop::Fail),
                (1, Some(p)) => propagate(p, st),
                _ => Ok(()),
            }
        }
    }
}

/// First disjunction of `f` that is neither entailed nor refuted.
pub(crate) fn open_disjunction<'a>(
    f: &'a Formula,
    st: &Store,
    skip: &dyn Fn(&[Formula]) -> bool,
) -> Result<Option<&'a [Formula]>, Stop> {
    match f {
        Formula::And(ps) => {
            for p in ps {
                if let Some(d) = open_disjunction(p, st, skip)? {
                    return Ok(Some(d));
                }
            }
            Ok(None)
        }
        Formula::Or(ps) if !skip(ps) => match truth(f, st)? {
            Truth::Unknown => Ok(Some(ps)),
            _ => Ok(None),
        },
        _ => Ok(None),
    }
}
