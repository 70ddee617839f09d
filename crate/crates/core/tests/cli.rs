//! Black-box tests of the binary: exit-code contract, determinism of
//! reports, and file output.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modlie"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn pass_verdict_exits_zero() {
    let out = run(&["sl2-suite", "-p", "3"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verdict\": \"PASS\""));
    assert!(text.ends_with('\n'));
}

#[test]
fn error_exits_two() {
    let out = run(&["center", "--algebra", "/definitely/missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_command_exits_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fail_verdict_exits_one() {
    // probing x^2 and x^2 + xy: not a regular sequence (the Koszul count
    // fails in degree 4), so the verdict is FAIL with exit code 1
    let dir = std::env::temp_dir().join("modlie-cli-fail");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dependent.json");
    std::fs::write(
        &path,
        r#"{
  "name": "ab2",
  "basis": ["x", "y"],
  "brackets": [],
  "pmap": [["0", "0"], ["0", "0"]],
  "invariants": [
    {"name": "f1", "terms": [{"exponents": [2, 0], "coeff": "1"}]},
    {"name": "f2", "terms": [{"exponents": [2, 0], "coeff": "1"},
                             {"exponents": [1, 1], "coeff": "1"}]}
  ]
}"#,
    )
    .unwrap();
    let out = run(&[
        "probe-assumption",
        "--algebra",
        path.to_str().unwrap(),
        "--max-degree",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verdict\": \"FAIL\""));
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "kac-radul", "--algebra", "sl2", "-p", "3", "--samples", "5", "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join("modlie-cli-out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "compare", "--a", "sl2", "--b", "heis3", "-p", "3",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"verdict\": \"DISTINGUISHED\""));
}

#[test]
fn center_report_matches_known_dimension() {
    let out = run(&["center", "--algebra", "sl2", "-p", "3", "--max-degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"dimension\": 5"));
}

#[test]
fn bad_prime_is_skipped_with_warning() {
    let out = run(&["center", "--algebra", "sl2", "-p", "2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("excluded by the p >= 3 policy"));
}
