use std::process::Command;

use serde_json::Value;

fn weylpain(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weylpain"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut all = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--json", p]);
    let (code, _) = weylpain(&all);
    (code, serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap())
}

fn without_timing(mut v: Value) -> Value {
    for r in v["reports"].as_array_mut().unwrap() {
        r.as_object_mut().unwrap().remove("elapsed_ms");
    }
    v
}

#[test]
fn e6_symmetry_suite() {
    let (code, v) = report(&["verify", "--system", "e6", "--check", "symmetry", "--mode", "symbolic"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let reports = v["reports"].as_array().unwrap();
    let targets: Vec<&str> = reports.iter().map(|r| r["target"].as_str().unwrap()).collect();
    assert_eq!(targets, ["pi1", "pi2", "pi3", "s0", "s1", "s2", "s3", "s4", "s5", "s6"]);
    for r in reports {
        assert_eq!(r["status"], "PASS");
        assert_eq!(r["check"], "symmetry");
        assert_eq!(r["mode"], "symbolic");
        for key in ["system", "samples", "residual_excerpt", "elapsed_ms"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn e6_lattice_passes() {
    let (code, out) = weylpain(&["verify", "--system", "e6", "--check", "lattice"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS e6 lattice (Dinf)^2 = -2"));
    assert!(out.contains("PASS e6 lattice K = -D0-D1-Dinf"));
}

#[test]
fn bad_selectors_exit_2() {
    assert_eq!(weylpain(&["verify", "--system", "nosuch"]).0, 2);
    assert_eq!(weylpain(&["verify", "--system", "e6", "--check", "nope"]).0, 2);
    assert_eq!(weylpain(&["verify", "--system", "e6", "--mode", "guess"]).0, 2);
    assert_eq!(weylpain(&["verify", "--system", "e6", "--variant", "missing"]).0, 2);
    assert_eq!(weylpain(&["verify", "--bogus-flag"]).0, 2);
}

#[test]
fn failing_variant_exits_1() {
    let (code, v) = report(&["verify", "--system", "e6", "--check", "holomorphy", "--variant", "verbatim"]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["status"] == "FAIL")
        .map(|r| r["target"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty());
    let first = v["reports"].as_array().unwrap().iter().find(|r| r["status"] == "FAIL").unwrap();
    assert!(first["residual_excerpt"].as_str().unwrap().contains("remainder"));
}

#[test]
fn symbolic_reports_are_deterministic() {
    let args = ["verify", "--system", "pvi_g", "--check", "all", "--jobs", "2"];
    let (_, a) = report(&args);
    let (_, b) = report(&args);
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn probabilistic_seed_is_recorded_and_reproducible() {
    let args = [
        "verify", "--system", "e6", "--check", "holomorphy", "--mode", "probabilistic", "--samples", "5",
        "--seed", "42",
    ];
    let (code, a) = report(&args);
    assert_eq!(code, 0);
    assert_eq!(a["seed"], 42);
    assert!(a["reports"].as_array().unwrap().iter().all(|r| r["seed"] == 42 && r["samples"] == 5));
    let (_, b) = report(&args);
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn integrate_prints_csv() {
    let (code, out) = weylpain(&[
        "integrate", "--system", "e6", "--q", "2", "--p", "1", "--alpha", "0,0,0,0,0,0,0", "--t1", "0.1",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,chart,x,y,I"));
    assert_eq!(lines.next(), Some("0,qp,2,1,4"));
}

#[test]
fn integrate_escape_exits_1() {
    let (code, _) = weylpain(&[
        "integrate", "--system", "e6", "--q", "2", "--p", "1", "--alpha", "0,0,0,0,0,0,0",
    ]);
    assert_eq!(code, 1);
}
