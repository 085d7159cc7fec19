use std::path::PathBuf;
use std::process::Command;

use locfaults_cli::bench::{render_rows, run_manifest};
use locfaults_cli::main_with_args;
use locfaults_cli::report::{render_json, render_text, JsonReport};
use locfaults_core::frontend::{load, ParseOptions};
use locfaults_core::input::{Counterexample, Value};
use locfaults_core::locfaults::{brute_force_dcm, localize, prepare, Options};
use locfaults_core::LocRef;

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn program(name: &str) -> String {
    programs().join(name).to_string_lossy().into_owned()
}

/// Exit code, stdout, stderr.
fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("locfaults").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exit_codes_of_the_binary() {
    let bin = env!("CARGO_BIN_EXE_locfaults");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let abs = program("absminus.mimp");
    assert_eq!(status(&[&abs, "--ce", "i=0,j=1", "--no-timings"]), Some(0));
    assert_eq!(status(&[&abs, "--ce", "i=1,j=0"]), Some(2));
    assert_eq!(status(&[&abs]), Some(1));
    assert_eq!(status(&[&abs, "--ce", "i=0"]), Some(1));
    assert_eq!(status(&["no/such/file.mimp", "--ce", "i=0,j=1"]), Some(1));
    assert_eq!(status(&["--help"]), Some(0));
}

#[test]
fn errors_carry_codes() {
    let abs = program("absminus.mimp");
    let (code, out, err) = run(&[&abs]);
    assert_eq!((code, out.as_str()), (1, ""));
    assert_eq!(err, "error[usage]: one of --ce, --ce-file or --find-ce is required\n");

    let (code, _, err) = run(&[&abs, "--ce", "i=1,j=0"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[not-a-counterexample]: "), "{err}");

    let (code, _, err) = run(&[&abs, "--ce", "i=0,j=1", "--max-deviations", "9"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[usage]: "), "{err}");

    let (_, _, err) = run(&[&abs, "--ce", "i=0,k=1"]);
    assert!(err.starts_with("error[counterexample-shape]: "), "{err}");
    let (_, _, err) = run(&[&abs, "--ce", "i=0,j=x"]);
    assert!(err.starts_with("error[counterexample-syntax]: "), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mimp");
    std::fs::write(&bad, "//@ ensures x == 0;\nint P(int x) {\n  x = ;\n}\n").unwrap();
    let (code, _, err) = run(&[bad.to_str().unwrap(), "--ce", "x=1"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[syntax]: "), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn absminus_text_report() {
    let (code, out, _) = run(&[&program("absminus.mimp"), "--ce", "i=0,j=1", "--max-deviations", "2", "--no-timings"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "program: AbsMinus\n\
         counterexample: {i=0, j=1}\n\
         unroll: 1, max deviations: 2, max mcs size: 3, marking: on, domain: -32768..32767\n\
         deviation: {}\n  mcs: {15}\n\
         deviation: {8} (not a DCM)\n  mcs: (none)\n\
         deviation: {11}\n  mcs: {7}\n  mcs: {9}\n"
    );
}

#[test]
fn marking_off_reports_the_non_minimal_pair() {
    let (_, out, _) = run(&[
        &program("absminus.mimp"),
        "--ce",
        "i=0,j=1",
        "--max-deviations",
        "2",
        "--marking",
        "off",
        "--no-timings",
    ]);
    assert!(out.ends_with("deviation: {8, 11} (not a DCM)\n  mcs: {7}\n"), "{out}");
}

#[test]
fn timings_are_reported_unless_disabled() {
    let abs = program("absminus.mimp");
    let (_, out, _) = run(&[&abs, "--ce", "i=0,j=1"]);
    assert!(out.lines().last().unwrap().starts_with("time: preprocessing "), "{out}");
    let (_, out, _) = run(&[&abs, "--ce", "i=0,j=1", "--format", "json"]);
    let report: JsonReport = serde_json::from_str(&out).unwrap();
    let t = report.timings.unwrap();
    assert!(t.preprocessing_ms >= 0.0 && t.localization_ms >= 0.0);
}

#[test]
fn json_round_trip_is_identity() {
    for args in [
        vec![program("absminus.mimp"), "--ce".into(), "i=0,j=1".into()],
        vec![program("minimum.mimp"), "--ce".into(), "tab=3,2,1,0".into(), "--unroll".into(), "3".into()],
        vec![program("sum.mimp"), "--ce".into(), "n=3".into(), "--unroll".into(), "4".into()],
    ] {
        let mut argv: Vec<&str> = args.iter().map(String::as_str).collect();
        argv.extend(["--format", "json"]);
        let (code, out, _) = run(&argv);
        assert_eq!(code, 0);
        let parsed: JsonReport = serde_json::from_str(&out).unwrap();
        assert_eq!(parsed.schema, "locfaults-report/1");
        assert_eq!(render_json(&parsed), out);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in ["schema", "program", "counterexample", "config", "flags", "entries", "timings"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let runs: Vec<String> = (0..3)
        .map(|_| {
            run(&[&program("bubblesort4.mimp"), "--ce", "tab=1,0,0,0", "--unroll", "4", "--max-deviations", "2", "--no-timings"]).1
        })
        .collect();
    assert!(runs.iter().all(|r| *r == runs[0]));
    let bin = env!("CARGO_BIN_EXE_locfaults");
    let args = [program("minimum.mimp"), "--ce".into(), "tab=3,2,1,0".into(), "--unroll".into(), "3".into()];
    let a = Command::new(bin).args(&args).args(["--format", "json", "--no-timings"]).output().unwrap();
    let b = Command::new(bin).args(&args).args(["--format", "json", "--no-timings"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn counterexample_file_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let ce = dir.path().join("ce.json");
    std::fs::write(&ce, r#"{"tab": [3, 2, 1, 0]}"#).unwrap();
    let min = program("minimum.mimp");
    let (code, from_file, _) = run(&[&min, "--ce-file", ce.to_str().unwrap(), "--unroll", "3", "--no-timings"]);
    assert_eq!(code, 0);
    let (_, inline, _) = run(&[&min, "--ce", "tab=3,2,1,0", "--unroll", "3", "--no-timings"]);
    assert_eq!(from_file, inline);

    let (code, out, _) = run(&[&program("absminus.mimp"), "--find-ce", "1000", "--no-timings"]);
    assert_eq!(code, 0);
    assert!(out.contains("counterexample: {i="), "{out}");
    let (code, _, err) = run(&[&program("absminus.mimp"), "--find-ce", "1000", "--ce-range", "0..0"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[no-counterexample]"), "{err}");
}

#[test]
fn dot_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let (code, _, _) = run(&[&program("absminus.mimp"), "--ce", "i=0,j=1", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph \"AbsMinus\" {\n"));
    assert!(text.contains("[shape=diamond, label=\"8: i_0 <= j_0\"]"), "{text}");
    assert!(text.contains("[shape=box, label=\"9: k_1 = k_0 + 2\\l\"]"), "{text}");
    assert!(text.contains("[label=\"F\", style=dashed]"));
    assert!(text.ends_with("}\n"));
}

#[test]
fn empty_mcs_list_renders_none() {
    let (_, out, _) = run(&[&program("minimum.mimp"), "--ce", "tab=3,2,1,0", "--unroll", "3", "--max-deviations", "1", "--no-timings"]);
    let parsed: Vec<&str> = out.lines().collect();
    let i = parsed.iter().position(|l| *l == "deviation: {9:1} (not a DCM)").unwrap();
    assert_eq!(parsed[i + 1], "  mcs: (none)");
}

#[test]
fn shipped_manifest_passes() {
    let rows = run_manifest(&programs().join("bench.toml")).unwrap();
    let checked: Vec<&str> = rows.iter().filter(|r| r.golden).map(|r| r.name.as_str()).collect();
    assert_eq!(checked, ["absminus", "minimum", "squareroot"]);
    let table = render_rows(&rows, false);
    assert!(table.starts_with("run "));
    assert_eq!(table.lines().count(), rows.len() + 1);
}

#[test]
fn manifest_errors() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(&manifest, "[[run]]\nname = \"x\"\nprogram = \"missing.mimp\"\nce = \"i=0\"\nunroll = [1]\n").unwrap();
    let (code, _, err) = run(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[io]: "), "{err}");

    std::fs::write(&manifest, "[[run]]\nname = \"x\"\nprogram = \"p.mimp\"\nunroll = [1]\n").unwrap();
    let (_, _, err) = run(&["bench", manifest.to_str().unwrap()]);
    assert!(err.starts_with("error[manifest]: "), "{err}");

    let (_, _, err) = run(&["bench", dir.path().join("none.toml").to_str().unwrap()]);
    assert!(err.starts_with("error[io]: "), "{err}");
}

#[test]
fn golden_mismatch_names_the_first_differing_entry() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(programs().join("absminus.mimp"), dir.path().join("absminus.mimp")).unwrap();
    let golden = std::fs::read_to_string(programs().join("goldens/absminus.txt")).unwrap();
    let wrong = golden.replace("  mcs: {9}\n", "  mcs: {12}\n");
    assert_ne!(golden, wrong);
    std::fs::write(dir.path().join("golden.txt"), wrong).unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(
        &manifest,
        "[[run]]\nname = \"abs\"\nprogram = \"absminus.mimp\"\nce = \"i=0,j=1\"\nunroll = [1]\nmax_deviations = 2\ngolden = \"golden.txt\"\n",
    )
    .unwrap();
    let (code, _, err) = run(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(
        err,
        "error[golden-mismatch]: abs (b=1): golden mismatch at entry 2\n  \
         expected: deviation: {11} |   mcs: {7} |   mcs: {12}\n  \
         actual:   deviation: {11} |   mcs: {7} |   mcs: {9}\n"
    );
}

/// The reconstructed Sum program misses the last term; deviating the last
/// loop test adds it. Checked against the exhaustive deviation search.
#[test]
fn sum_loop_condition_is_suspected() {
    let text = std::fs::read_to_string(programs().join("sum.mimp")).unwrap();
    let p = load(&text, &ParseOptions::default()).unwrap();
    let ce = Counterexample::new().with("n", Value::Int(5));
    for b in [6, 16] {
        let g = prepare(&p, b).unwrap();
        let report = localize(&g, &ce, &Options { max_deviations: 3, ..Options::default() }).unwrap();
        let dcms: Vec<Vec<LocRef>> = report.dcms().map(|e| e.deviation.clone()).collect();
        assert_eq!(dcms, [vec![LocRef::parse("7:5").unwrap()]]);
        let oracle: Vec<Vec<usize>> = brute_force_dcm(&g, &ce, 3).unwrap().into_iter().map(|d| d.conditions).collect();
        let got: Vec<Vec<usize>> = report.dcms().map(|e| e.nodes.clone()).collect();
        assert_eq!(got, oracle);
        let text = render_text(&JsonReport::new(&report, None));
        assert!(text.contains("deviation: {7:5}\n"), "{text}");
    }
}
