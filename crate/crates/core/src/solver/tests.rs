use super::*;
use alloc::boxed::Box;
use alloc::vec;
use proptest::prelude::*;

fn v(i: u32) -> Term {
    Term::Var(VarId(i))
}

fn c(x: i64) -> Term {
    Term::Const(x)
}

fn table(n: usize, d: Domain) -> VarTable {
    let mut t = VarTable::new();
    for i in 0..n {
        t.declare(&alloc::format!("x{i}"), d);
    }
    t
}

/// Exhaustive enumeration over the whole box, used as the oracle.
fn brute(csp: &Csp) -> bool {
    let n = csp.vars.len();
    let m = csp.indicators.len();
    let mut values: Vec<i64> = csp.vars.ids().map(|v| csp.vars.domain(v).lo).collect();
    loop {
        for mask in 0..(1u32 << m) {
            let a = Assignment {
                values: values.clone(),
                indicators: (0..m).map(|i| mask & (1 << i) != 0).collect(),
            };
            if satisfies(csp, &a) {
                return true;
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            let d = csp.vars.domain(VarId(i as u32));
            if values[i] < d.hi {
                values[i] += 1;
                break;
            }
            values[i] = d.lo;
            i += 1;
        }
    }
}

#[test]
fn linear_equalities() {
    let vars = table(2, Domain::default());
    let csp = Csp::new(
        vars,
        vec![
            Formula::eq(Term::add(v(0), v(1)), c(10)),
            Formula::eq(Term::sub(v(0), v(1)), c(4)),
        ],
    );
    match solve(&csp).unwrap() {
        SolveResult::Sat(a) => assert_eq!(a.values, vec![7, 3]),
        SolveResult::Unsat => panic!("expected sat"),
    }
}

#[test]
fn parity_is_unsat() {
    let vars = table(1, Domain::default());
    let csp = Csp::new(vars, vec![Formula::eq(Term::mul(c(2), v(0)), c(7))]);
    assert_eq!(solve(&csp).unwrap(), SolveResult::Unsat);
}

#[test]
fn square_root_bounds() {
    // r*r <= 50 && (r+1)*(r+1) > 50 has the single solution 7
    let vars = table(2, Domain::default());
    let csp = Csp::new(
        vars,
        vec![
            Formula::atom(Rel::Le, Term::mul(v(0), v(0)), c(50)),
            Formula::eq(v(1), Term::add(v(0), c(1))),
            Formula::atom(Rel::Gt, Term::mul(v(1), v(1)), c(50)),
        ],
    );
    match solve(&csp).unwrap() {
        SolveResult::Sat(a) => assert_eq!(a.values[0], 7),
        SolveResult::Unsat => panic!("expected sat"),
    }
}

#[test]
fn disequality_cycle() {
    let vars = table(3, Domain::new(0, 1));
    let csp = Csp::new(
        vars,
        vec![
            Formula::atom(Rel::Ne, v(0), v(1)),
            Formula::atom(Rel::Ne, v(1), v(2)),
            Formula::atom(Rel::Ne, v(0), v(2)),
        ],
    );
    assert_eq!(solve(&csp).unwrap(), SolveResult::Unsat);
}

#[test]
fn disjunction_split() {
    let vars = table(2, Domain::default());
    let csp = Csp::new(
        vars,
        vec![
            Formula::or(vec![
                Formula::atom(Rel::Gt, v(0), c(100)),
                Formula::atom(Rel::Lt, v(0), c(-100)),
            ]),
            Formula::atom(Rel::Ge, v(0), c(-150)),
            Formula::atom(Rel::Le, v(0), c(50)),
            Formula::eq(v(1), Term::neg(v(0))),
        ],
    );
    let SolveResult::Sat(a) = solve(&csp).unwrap() else { panic!() };
    assert!(a.values[0] < -100 && a.values[1] == -a.values[0]);
}

#[test]
fn indicators_and_cardinality() {
    let vars = table(1, Domain::default());
    let soft = vec![
        Formula::eq(v(0), c(1)),
        Formula::eq(v(0), c(2)),
        Formula::eq(v(0), c(3)),
    ];
    let csp = add_y_vars(vars, vec![], soft);
    assert_eq!(solve(&csp.with_at_most(1)).unwrap(), SolveResult::Unsat);
    let SolveResult::Sat(a) = solve(&csp.with_at_most(2)).unwrap() else { panic!() };
    assert_eq!(a.relaxed().len(), 2);
    assert!(satisfies(&csp.with_at_most(2), &a));
    let mut blocked = csp.with_at_most(2);
    blocked.add_clause(BlockingClause(vec![1, 2]));
    blocked.add_clause(BlockingClause(vec![0, 2]));
    blocked.add_clause(BlockingClause(vec![0, 1]));
    assert_eq!(solve(&blocked).unwrap(), SolveResult::Unsat);
}

#[test]
fn classification() {
    let vars = table(2, Domain::default());
    let lin = Csp::new(vars.clone(), vec![Formula::eq(Term::mul(c(3), v(0)), v(1))]);
    assert_eq!(lin.class, ProblemClass::Linear);
    let nl = Csp::new(vars, vec![Formula::eq(Term::mul(v(0), v(1)), c(6))]);
    assert_eq!(nl.class, ProblemClass::NonLinear);
}

#[test]
fn overflow_is_reported() {
    let d = Domain::new(i64::MIN / 2, i64::MAX / 2);
    let vars = table(1, d);
    let x = v(0);
    let p = Term::mul(Term::mul(x.clone(), x.clone()), Term::mul(x.clone(), x));
    let csp = Csp::new(vars, vec![Formula::atom(Rel::Gt, p, c(0))]);
    assert_eq!(solve(&csp), Err(SolverError::DomainOverflow));
}

#[test]
fn empty_domain_is_unsat() {
    let vars = table(1, Domain::new(3, 2));
    assert_eq!(solve(&Csp::new(vars, vec![])).unwrap(), SolveResult::Unsat);
}

fn arb_term(nvars: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(-3i64..=3).prop_map(Term::Const), (0..nvars).prop_map(|i| Term::Var(VarId(i)))];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
            inner.prop_map(|a| Term::Neg(Box::new(a))),
        ]
    })
}

fn arb_rel() -> impl Strategy<Value = Rel> {
    prop_oneof![
        Just(Rel::Eq),
        Just(Rel::Ne),
        Just(Rel::Lt),
        Just(Rel::Le),
        Just(Rel::Gt),
        Just(Rel::Ge)
    ]
}

fn arb_formula(nvars: u32) -> impl Strategy<Value = Formula> {
    let atom = (arb_rel(), arb_term(nvars), arb_term(nvars)).prop_map(|(r, a, b)| Formula::Atom(r, a, b));
    atom.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Formula::And),
            prop::collection::vec(inner, 1..3).prop_map(Formula::Or),
        ]
    })
}

fn arb_csp() -> impl Strategy<Value = Csp> {
    (1u32..=3, -4i64..=0, 0i64..=4).prop_flat_map(|(n, lo, hi)| {
        (
            prop::collection::vec(arb_formula(n), 0..3),
            prop::collection::vec(arb_formula(n), 0..4),
            prop::option::of(0usize..3),
        )
            .prop_map(move |(hard, soft, k)| {
                let mut csp = add_y_vars(table(n as usize, Domain::new(lo, hi)), hard, soft);
                csp.at_most = k;
                csp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn sound_and_complete(csp in arb_csp()) {
        let got = solve(&csp).unwrap();
        if let SolveResult::Sat(a) = &got {
            prop_assert!(satisfies(&csp, a));
        }
        prop_assert_eq!(got.is_sat(), brute(&csp));
    }

    #[test]
    fn adding_constraints_never_creates_solutions(csp in arb_csp(), extra in arb_formula(1)) {
        let mut tighter = csp.clone();
        tighter.hard.push(extra);
        if solve(&csp).unwrap() == SolveResult::Unsat {
            prop_assert_eq!(solve(&tighter).unwrap(), SolveResult::Unsat);
        }
    }
}
