use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(format!("{name}.sct"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sct-check")).args(args).output().expect("binary runs")
}

fn run_on(name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![path.to_str().unwrap()];
    args.extend(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_encode_the_verdict() {
    for name in ["example1_filter", "plus", "lenfil"] {
        let out = run_on(name, &[]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(stdout(&out).starts_with("verdict: TERMINATING"), "{name}");
    }
    for name in ["appf", "ordrec", "stlc", "div", "fg"] {
        let out = run_on(name, &[]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(stdout(&out).starts_with("verdict: MAYBE"), "{name}");
    }
}

#[test]
fn unreadable_input_is_an_error() {
    let out = run(&["/no/such/file.sct"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.starts_with("sct-check: cannot read /no/such/file.sct"), "{err}");
    assert!(stdout(&out).contains("verdict: ERROR"));
}

#[test]
fn unparsable_input_is_an_error() {
    let dir = std::env::temp_dir();
    let path = dir.join("sct_check_cli_garbage.sct");
    std::fs::write(&path, "symbol oops").unwrap();
    let out = run(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("sct-check: "), "{err}");
}

#[test]
fn the_summary_names_each_condition() {
    let out = run_on("example1_filter", &[]);
    let text = stdout(&out);
    assert!(text.contains("conditions: a=pass b=pass c=pass d=pass pfp=pass sct=pass"));
    assert!(text.contains("assumptions: local_confluence=unchecked subject_reduction=unchecked"));
    assert!(text.contains("dependency pairs: 20"));
    assert!(text.contains("closure loops: 7, all with a strict diagonal decrease"));
}

#[test]
fn failures_are_reported_with_their_reason() {
    let div = stdout(&run_on("div", &[]));
    assert!(div.contains("size-change violation at /: idempotent loop without decrease (2x2)"));

    let ordrec = stdout(&run_on("ordrec", &[]));
    assert!(ordrec.contains("size-change violation at ordrec"));
    assert!(ordrec.contains("function passing: variable f"));
}

#[test]
fn dependency_pairs_can_be_listed() {
    let out = run_on("example1_filter", &["--list-dps"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[0], "El (arrow a b) > El a");
    assert_eq!(lines[2], "s p + q > p + q");
    assert_eq!(lines[19], "fil_aux false a f x p l > fil a f p l");
}

#[test]
fn matrices_can_be_listed() {
    let out = run_on("example1_filter", &["--matrices"]);
    let text = stdout(&out);
    assert!(text.starts_with("A: El -> El (1x1)\n  [-1]\n"));
    assert!(text.contains("C: + -> + (2x2)\n  [-1, inf]\n  [inf, 0]\n"));
}

#[test]
fn json_output_has_the_stable_key_set() {
    let out = run_on("example1_filter", &["--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "assumptions",
            "closure_loops",
            "conditions",
            "dependency_pairs",
            "error",
            "fuzz_witness",
            "matrices",
            "precedence",
            "timing_ms",
            "verdict",
        ]
    );
    assert_eq!(doc["verdict"], "TERMINATING");
    assert_eq!(doc["dependency_pairs"].as_array().unwrap().len(), 20);
}

#[test]
fn json_reruns_are_identical_up_to_timing() {
    let mut a: serde_json::Value =
        serde_json::from_str(&stdout(&run_on("example1_filter", &["--json"]))).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&stdout(&run_on("example1_filter", &["--json"]))).unwrap();
    a["timing_ms"] = serde_json::json!(0);
    b["timing_ms"] = serde_json::json!(0);
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn summary_reruns_are_byte_identical() {
    let a = stdout(&run_on("example1_filter", &[]));
    let b = stdout(&run_on("example1_filter", &[]));
    assert_eq!(a, b);
}

#[test]
fn dot_export_writes_both_graphs() {
    let path = std::env::temp_dir().join("sct_check_cli_graph.dot");
    let out = run_on("example1_filter", &["--dot", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("digraph pre_closure {"));
    assert!(text.contains("digraph post_closure {"));
    assert!(text.contains("\"El\" -> \"El\" [label=\"A\"];"));
}

#[test]
fn skipping_the_typing_phase_downgrades_the_verdict() {
    let out = run_on("example1_filter", &["--skip-typing"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("verdict: MAYBE"));
    assert!(text.contains("d=skipped pfp=skipped"));
}

#[test]
fn fuzzing_attaches_a_cycle_trace() {
    let out = run_on("appf", &["--fuzz", "--fuzz-depth", "5"]);
    let text = stdout(&out);
    assert!(text.contains("cycle found: f c1 c1 (length 2)"), "{text}");
    assert!(text.contains("--> app (f c1) c1 (rule 2)"), "{text}");
    assert!(text.contains("--> f c1 c1 (rule 1)"), "{text}");

    let quiet = stdout(&run_on("example1_filter", &["--fuzz"]));
    assert!(quiet.contains("cycle search: no cycle found"), "{quiet}");
}
