//! Exit codes and output of the command-line front end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bench(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thresholdmc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_exit_codes_and_json() {
    let (strb, weak, spec) = (bench("strb.ta"), bench("strb_weak.ta"), bench("strb.spec"));
    let ok = run(&["verify", "--ta", &strb, "--spec", &spec, "--name", "unforg"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("verdict: verified"));

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let cex = run(&[
        "verify",
        "--ta",
        &weak,
        "--spec",
        &spec,
        "--name",
        "unforg",
        "--jobs",
        "2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(cex.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(value["verdict"], "counterexample");
}

#[test]
fn usage_and_input_errors_exit_3() {
    assert_eq!(run(&["verify", "--bogus"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--ta", "/nonexistent.ta", "--spec", "x", "--name", "y"]).status.code(), Some(3));
    let (strb, spec) = (bench("strb.ta"), bench("strb.spec"));
    let bad = run(&["oracle", "--ta", &strb, "--spec", &spec, "--name", "unforg", "--params", "n=3,t=1,f=0"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn shapes_and_oracle() {
    let (strb, weak, spec) = (bench("strb.ta"), bench("strb_weak.ta"), bench("strb.spec"));
    let shapes = run(&["shapes", "--ta", &strb, "--spec", &spec, "--name", "corr"]);
    assert!(stdout(&shapes).starts_with("3 shapes"));
    let clean = run(&["oracle", "--ta", &strb, "--spec", &spec, "--name", "unforg", "--params", "n=4,t=1,f=1"]);
    assert_eq!(clean.status.code(), Some(0));
    let found = run(&["oracle", "--ta", &weak, "--spec", &spec, "--name", "unforg", "--params", "n=4,t=1,f=2"]);
    assert_eq!(found.status.code(), Some(1));
    assert!(stdout(&found).contains("witness"));
}

#[test]
fn reduce_prints_certificate() {
    let out = run(&[
        "reduce",
        "--ta",
        &bench("strb.ta"),
        "--params",
        "n=4,t=1,f=1",
        "--kappa",
        "1,1,1,0",
        "--shared",
        "2",
        "--schedule",
        "r1,r6,r4,r2,r4",
        "--locs",
        "l2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("decomposition: [0, 1, 2, 1, 0]"));
    assert!(text.contains("type C"));
    assert!(text.contains("case: Enter"));
    assert!(!text.contains("invariant=false"));
}
