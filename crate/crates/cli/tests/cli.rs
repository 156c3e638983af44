use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn splitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitlab"))
        .args(args)
        .output()
        .expect("run splitlab")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid JSON line"))
        .collect()
}

#[test]
fn bounds_sharp_constant() {
    let out = splitlab(&["bounds", "--dq", "2", "--e", "3", "--f", "3"]);
    assert!(out.status.success());
    let r = &json_lines(&out)[0];
    assert_eq!(r["schema"], 1);
    assert_eq!(r["p2_relcanonical"]["exact"], "1/2");
    assert_eq!(r["zeta_prime"]["exact"], "1/2");
    assert!(r["wall_clock"].is_string());
    assert!(r["version"].as_str().unwrap().starts_with("0.1.0-"));
}

#[test]
fn sample_record_schema() {
    let out = splitlab(&[
        "sample", "--degree", "2", "--trials", "300", "--seed", "4", "--thresholds", "1,3/2",
    ]);
    assert!(out.status.success());
    let r = &json_lines(&out)[0];
    for key in ["config", "histogram", "rejected", "estimates", "runtime_ms", "seed", "version", "wall_clock"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    let counted: u64 = r["histogram"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(counted + r["rejected"].as_u64().unwrap(), 300);
    let est = r["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 2);
    for key in ["threshold", "freq", "chat", "ci_lo", "ci_hi"] {
        assert!(est[0].get(key).is_some(), "missing estimates.{key}");
    }
}

#[test]
fn appends_byte_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.jsonl");
    let p = path.to_str().unwrap();
    let args = ["sample", "--degree", "3", "--trials", "200", "--seed", "11", "--deterministic", "--out", p];
    for threads in ["1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_splitlab"))
            .args(args)
            .env("LAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
}

#[test]
fn csv_histogram() {
    let out = splitlab(&["sample", "--trials", "50", "--format", "csv", "--thresholds", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("section,mu,count"));
}

#[test]
fn invalid_config_exit_code() {
    assert_eq!(splitlab(&["sample", "--field", "9"]).status.code(), Some(2));
    assert_eq!(splitlab(&["sample", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(splitlab(&["sample", "--bundle", "/nonexistent/bundle"]).status.code(), Some(2));
    assert_eq!(splitlab(&["bounds"]).status.code(), Some(2));
    assert_eq!(splitlab(&["sample", "--seed", "x"]).status.code(), Some(2));
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_splitlab"))
        .args(["bounds", "--mu", "1"])
        .env("LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pinched.txt");
    // the maximal minors share the factor x on every curve
    fs::write(
        &path,
        "presentation\nvars 3\nkind kernel\nsource -2 -2\ntarget 0\nentry 0 0 1:1,1,0\nentry 0 1 1:1,0,1\nend\n",
    )
    .unwrap();
    let out = splitlab(&["sample", "--bundle", path.to_str().unwrap(), "--trials", "40"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn splitting_from_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conic.txt");
    fs::write(&path, "curve\ndegree 2\nx 1 0 0\ny 0 1 0\nz 0 0 1\nend\n").unwrap();
    let out = splitlab(&["splitting", "--curve", path.to_str().unwrap()]);
    assert!(out.status.success());
    let r = &json_lines(&out)[0];
    assert_eq!(r["report"]["splitting"], serde_json::json!([3, 3]));
    assert_eq!(r["report"]["mu"], "0");
}

#[test]
fn schwarzenberger_example() {
    let out = splitlab(&["verify-example", "schwarzenberger"]);
    assert!(out.status.success());
    let r = &json_lines(&out)[0];
    assert_eq!(r["reproduced"], true);
    assert_eq!(r["lines"]["jumping"], 8);
}

#[test]
fn lines_and_fitting() {
    let out = splitlab(&["lines", "--bundle", "sum:2,0", "--field", "5"]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["jumping"], 0);

    let out = splitlab(&["fitting", "--bundle", "tangent", "--j", "2"]);
    assert!(out.status.success());
    let r = &json_lines(&out)[0];
    assert_eq!(r["ideals"][0]["generators"], serde_json::json!(["x", "y", "z"]));
}
