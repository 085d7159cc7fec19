use super::*;
use crate::frontend::{load, ParseOptions};
use crate::mcs::verify_mcs;
use crate::testgen::arb_program;
use alloc::format;
use alloc::string::ToString;
use proptest::prelude::*;

const ABSMINUS: &str = include_str!("../../../../programs/absminus.mimp");
const MINIMUM: &str = include_str!("../../../../programs/minimum.mimp");

fn program(src: &str) -> ValidatedProgram {
    load(src, &ParseOptions::default()).unwrap()
}

fn lines(e: &Entry) -> String {
    e.deviation.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

fn mcss(e: &Entry) -> Vec<String> {
    e.mcss
        .iter()
        .map(|m| m.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
        .collect()
}

fn summary(r: &Report) -> Vec<String> {
    r.entries
        .iter()
        .map(|e| format!("{{{}}} corrected={} dcm={} {:?}", lines(e), e.corrected, e.is_dcm, mcss(e)))
        .collect()
}

fn ij(i: i64, j: i64) -> Counterexample {
    Counterexample::new().with("i", Value::Int(i)).with("j", Value::Int(j))
}

#[test]
fn absminus_report() {
    let g = prepare(&program(ABSMINUS), 1).unwrap();
    let opts = Options { max_deviations: 2, ..Options::default() };
    let r = localize(&g, &ij(0, 1), &opts).unwrap();
    assert_eq!(
        summary(&r),
        [
            "{} corrected=false dcm=false [\"15\"]",
            "{8} corrected=false dcm=false []",
            "{11} corrected=true dcm=true [\"7\", \"9\"]",
        ]
    );
    assert!(!r.unroll_insufficient);

    let v1 = localize(&g, &ij(0, 1), &Options { marking: false, ..opts }).unwrap();
    let last = v1.entries.last().unwrap();
    assert_eq!(lines(last), "8,11");
    assert!(last.corrected && !last.is_dcm);
}

#[test]
fn minimum_report() {
    let g = prepare(&program(MINIMUM), 3).unwrap();
    let ce = Counterexample::new().with("tab", Value::Array(vec![3, 2, 1, 0]));
    let r = localize(&g, &ce, &Options { max_deviations: 1, ..Options::default() }).unwrap();
    assert_eq!(mcss(&r.entries[0]), ["9:2.11"]);
    let dcms: Vec<&Entry> = r.dcms().collect();
    assert_eq!(dcms.len(), 1);
    assert_eq!(lines(dcms[0]), "9:3");
    assert_eq!(mcss(dcms[0]), ["8", "9:1.13", "9:2.13"]);
}

#[test]
fn errors() {
    let g = prepare(&program(ABSMINUS), 1).unwrap();
    assert_eq!(localize(&g, &ij(1, 0), &Options::default()), Err(LocalizeError::NotACounterexample));
    let src = "//@ requires x > 0;\n//@ ensures x < 0;\nint f(int x) {\n  return x;\n}";
    let g = prepare(&program(src), 1).unwrap();
    let ce = Counterexample::new().with("x", Value::Int(0));
    assert_eq!(localize(&g, &ce, &Options::default()), Err(LocalizeError::PreconditionViolated));
}

fn absminus_cond(g: &Cfg, line: u32) -> NodeId {
    g.condition_nodes().into_iter().find(|n| g.nodes[*n].loc.line == line).unwrap()
}

#[test]
fn absminus_steps_and_oracle() {
    let g = prepare(&program(ABSMINUS), 1).unwrap();
    let c11 = absminus_cond(&g, 11);
    let step = explore_step(&g, &ij(0, 1), 1, None).unwrap();
    assert_eq!(step, [DeviationSet { conditions: vec![c11], corrected: true }]);
    assert_eq!(brute_force_dcm(&g, &ij(0, 1), 2).unwrap(), step);
    assert_eq!(explore_step(&g, &ij(0, 1), 3, None).unwrap(), []);
}

/// Line of the condition labelled `label` in `src`.
fn label_line(src: &str, label: u32) -> u32 {
    let needle = format!("(c{label} == 1)");
    src.lines().position(|l| l.contains(&needle)).unwrap() as u32 + 1
}

const MARKING: &str = "//@ ensures ok >= 1;
int Marking(int c1, int c2, int c3, int c4, int c5, int c6, int c7, int c8, int c9, int c10, int c11, int c12, int c13, int c14, int c15, int c16) {
  int p = 0;
  int q = 0;
  int ok = 0;
  if (c1 == 1) {
    if (c2 == 1) {
      if (c3 == 1) {
        if (c4 == 1) {
          if (c5 == 1) {
            p = 0;
          } else {
            if (c6 == 1) {
              p = 0;
            } else {
              p = 1;
            }
          }
        }
      }
    }
  } else {
    if (c8 == 1) {
      if (c9 == 1) {
        if (c10 == 1) {
          q = 0;
        } else {
          if (c11 == 1) {
            if (c12 == 1) {
              q = 1;
            }
          }
        }
      } else {
        if (c13 == 1) {
          if (c14 == 1) {
            if (c15 == 1) {
              if (c16 == 1) {
                q = 1;
              }
            }
          }
        }
      }
    }
  }
  if (c7 == 1) {
    ok = p + q;
  }
}
";

fn marking_setup() -> (Cfg, Counterexample, BTreeMap<NodeId, u32>) {
    let g = prepare(&program(MARKING), 1).unwrap();
    let mut ce = Counterexample::new();
    for i in 1..=16 {
        ce = ce.with(&format!("c{i}"), Value::Int(0));
    }
    let mut labels = BTreeMap::new();
    for label in 1..=16 {
        let line = label_line(MARKING, label);
        labels.insert(absminus_cond(&g, line), label);
    }
    (g, ce, labels)
}

fn labelled(sets: &[DeviationSet], labels: &BTreeMap<NodeId, u32>) -> Vec<Vec<u32>> {
    sets.iter().map(|s| s.conditions.iter().map(|c| labels[c]).collect()).collect()
}

#[test]
fn marking_prunes_the_longer_deviation() {
    let (g, ce, labels) = marking_setup();
    let opts = Options { max_deviations: 6, max_mcs: 1, ..Options::default() };
    let v2 = localize(&g, &ce, &opts).unwrap();
    let found: Vec<Vec<u32>> = v2
        .entries
        .iter()
        .filter(|e| e.corrected)
        .map(|e| e.nodes.iter().map(|c| labels[c]).collect())
        .collect();
    assert_eq!(found, [vec![1, 2, 3, 4, 7], vec![8, 9, 11, 12, 7]]);

    let v1 = localize(&g, &ce, &Options { marking: false, ..opts }).unwrap();
    let found: Vec<Vec<u32>> = v1.dcms().map(|e| e.nodes.iter().map(|c| labels[c]).collect()).collect();
    assert_eq!(found, [vec![1, 2, 3, 4, 7], vec![8, 9, 11, 12, 7], vec![8, 13, 14, 15, 16, 7]]);

    let oracle = brute_force_dcm(&g, &ce, 6).unwrap();
    assert_eq!(labelled(&oracle, &labels), found);
}

const TRITYPE_SHAPE: &str = "//@ ensures f26 + f35 + f53 + f29 * f57 + f32 * f44 >= 1;
int Shape(int x26, int x29, int x32, int x35, int x44, int x53, int x57) {
  int f26 = 0;
  int f29 = 0;
  int f32 = 0;
  int f35 = 0;
  int f44 = 0;
  int f53 = 0;
  int f57 = 0;
";

fn tritype_shape() -> String {
    let mut src = String::from(TRITYPE_SHAPE);
    let mut line = src.lines().count() as u32;
    for target in [26u32, 29, 32, 35, 44, 53, 57] {
        while line + 1 < target {
            src.push('\n');
            line += 1;
        }
        src.push_str(&format!("  if (x{target} != 0) {{\n    f{target} = 1;\n  }}\n"));
        line += 3;
    }
    src.push_str("}\n");
    src
}

#[test]
fn tritype_shape_marking() {
    let src = tritype_shape();
    let p = program(&src);
    let g = prepare(&p, 1).unwrap();
    let mut ce = Counterexample::new();
    for x in [26, 29, 32, 35, 44, 53, 57] {
        ce = ce.with(&format!("x{x}"), Value::Int(0));
    }
    let line_sets = |sets: &[DeviationSet]| -> Vec<Vec<u32>> {
        sets.iter().map(|s| s.conditions.iter().map(|c| g.nodes[*c].loc.line).collect()).collect()
    };
    let mut marks = Marks::new();
    let step1 = explore_step(&g, &ce, 1, Some(&marks)).unwrap();
    assert_eq!(line_sets(&step1), [vec![26], vec![35], vec![53]]);
    for s in &step1 {
        marks.insert(s.last().unwrap(), 1);
    }
    let step2 = explore_step(&g, &ce, 2, Some(&marks)).unwrap();
    assert_eq!(line_sets(&step2), [vec![29, 57], vec![32, 44]]);
    for s in &step2 {
        marks.insert(s.last().unwrap(), 2);
    }
    assert_eq!(explore_step(&g, &ce, 3, Some(&marks)).unwrap(), []);

    let unmarked = explore_step(&g, &ce, 2, None).unwrap();
    let cancelled: Vec<Vec<u32>> = line_sets(&unmarked).into_iter().filter(|s| !line_sets(&step2).contains(s)).collect();
    for s in [vec![26, 29], vec![26, 35], vec![29, 35], vec![32, 35]] {
        assert!(cancelled.contains(&s), "{s:?}");
    }
    let r = localize(&g, &ce, &Options { max_deviations: 3, max_mcs: 1, ..Options::default() }).unwrap();
    let reported: Vec<Vec<u32>> = r.dcms().map(|e| e.deviation.iter().map(|l| l.line).collect()).collect();
    assert_eq!(reported, [vec![26], vec![35], vec![53], vec![29, 57], vec![32, 44]]);
}

#[test]
fn counterexample_search() {
    let p = program(ABSMINUS);
    let ce = find_counterexample(&p, 1, 1000, Domain::new(0, 3)).unwrap();
    assert_eq!(ce, ij(0, 1));
    let correct = "//@ ensures \\result >= x;\nint f(int x) {\n  return x + 1;\n}";
    assert_eq!(find_counterexample(&program(correct), 1, 1000, Domain::new(-10, 10)), None);
    let p = program(MINIMUM);
    let ce = find_counterexample(&p, 3, 1000, Domain::new(0, 3)).unwrap();
    let run = interp::run(&p, &ce, Some(3)).unwrap();
    assert!(!run.post_holds);
    let Some(Value::Array(cells)) = ce.get("tab") else { panic!() };
    assert!(cells.iter().all(|c| (0..=3).contains(c)));
    assert_eq!(find_counterexample(&p, 3, 1, Domain::new(0, 3)), None);
}

fn xy(x: i64, y: i64) -> Counterexample {
    Counterexample::new().with("x", Value::Int(x)).with("y", Value::Int(y))
}

/// Solver domain for random programs: refuting products of free variables
/// takes time proportional to the domain area.
const SMALL: Domain = Domain::new(-64, 64);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn v1_matches_oracle_and_v2_is_filtered_v1(src in arb_program(false, 5), x in -4i64..5, y in -4i64..5) {
        let p = program(&src);
        let g = prepare(&p, 1).unwrap();
        let ce = xy(x, y);
        let base = propagate(&g, &ce, &[]).unwrap();
        prop_assume!(base.fault.is_none() && !base.post_holds);
        let opts = Options { max_deviations: 3, max_mcs: 2, marking: false, domain: SMALL };
        let v1 = match localize(&g, &ce, &opts) {
            Ok(r) => r,
            Err(LocalizeError::Path(PathError::Fault(_))) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        let dcms: Vec<Vec<NodeId>> = v1.dcms().map(|e| e.nodes.clone()).collect();
        let oracle: Vec<Vec<NodeId>> = brute_force_dcm(&g, &ce, 3).unwrap().into_iter().map(|d| d.conditions).collect();
        let (mut a, mut b) = (dcms.clone(), oracle);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);

        let v2 = localize(&g, &ce, &Options { marking: true, ..opts }).unwrap();
        let mut marks = Marks::new();
        let mut expected = Vec::new();
        for k in 1..=3 {
            let mut kept = Vec::new();
            for e in v1.entries.iter().filter(|e| e.corrected && e.nodes.len() == k) {
                if e.nodes.iter().all(|c| marks.get(c).is_none_or(|m| *m >= k)) {
                    kept.push(e.nodes.clone());
                }
            }
            for s in &kept {
                marks.entry(*s.last().unwrap()).or_insert(k);
            }
            expected.extend(kept);
        }
        let got: Vec<Vec<NodeId>> = v2.entries.iter().filter(|e| e.corrected).map(|e| e.nodes.clone()).collect();
        prop_assert_eq!(&got, &expected);
        prop_assert!(v2.entries.iter().filter(|e| e.corrected).all(|e| e.is_dcm));
        prop_assert_eq!(localize(&g, &ce, &Options { marking: true, ..opts }).unwrap(), v2);
    }

    #[test]
    fn reported_mcss_are_minimal(src in arb_program(false, 4), x in -4i64..5, y in -4i64..5) {
        let p = program(&src);
        let g = prepare(&p, 1).unwrap();
        let ce = xy(x, y);
        let base = propagate(&g, &ce, &[]).unwrap();
        prop_assume!(base.fault.is_none() && !base.post_holds);
        let csp = ce_path_csp(&g, &ce, SMALL).unwrap();
        for m in enumerate_mcs(&csp, 2).unwrap() {
            prop_assert!(verify_mcs(&csp, &m).unwrap());
        }
        for d in explore_step(&g, &ce, 1, None).unwrap() {
            let csp = deviated_path_csp(&g, &ce, &d.conditions, SMALL).unwrap();
            for m in enumerate_mcs(&csp, 2).unwrap() {
                prop_assert!(verify_mcs(&csp, &m).unwrap());
            }
        }
    }
}

