use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_triplekit"));
    c.env_remove("TRIPLEKIT_FLOAT_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("triplekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn write_normal_form(name: &str, args: &[&str]) -> PathBuf {
    let p = tmp(name);
    let mut full = vec!["normal-form"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", p.to_str().unwrap()]);
    let o = run(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn pipeline_normal_form_into_verify() {
    let nf = run(&["normal-form", "lorentz", "--f", "1,2"]);
    assert_eq!(nf.status.code(), Some(0));
    let v = run_stdin(&["verify"], &nf.stdout);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    let rep: Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(rep["jacobi"], true);
    assert_eq!(rep["signature_m"], serde_json::json!([1, 3, 0]));
}

#[test]
fn every_family_sample_verifies() {
    for fam in ["lorentz", "least-nilpotent", "ia", "ib", "iia", "iib", "nil22", "nil23", "nil24", "iii", "iv"] {
        let nf = run(&["normal-form", fam]);
        assert_eq!(nf.status.code(), Some(0), "{fam}");
        let v = run_stdin(&["verify", "-"], &nf.stdout);
        assert_eq!(v.status.code(), Some(0), "{fam}");
    }
}

#[test]
fn ricci_of_three_dimensional_lorentz() {
    let p = write_normal_form("tau3.json", &["lorentz", "--f", "2"]);
    let o = run(&["ricci", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "Ric(Z*,Z*) = 2"), "{}", stdout(&o));
}

#[test]
fn ricci_of_nilpotent_is_zero() {
    let p = write_normal_form("nil23.json", &["nil23"]);
    let o = run(&["ricci", p.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "Ric = 0");
}

#[test]
fn isomorphic_exit_codes() {
    let a = write_normal_form("a.json", &["lorentz", "--f", "1,2"]);
    let b = write_normal_form("b.json", &["lorentz", "--f", "2,4"]);
    let c = write_normal_form("c.json", &["lorentz", "--f", "1,3"]);
    let (a, b, c) = (a.to_str().unwrap(), b.to_str().unwrap(), c.to_str().unwrap());
    let o = run(&["isomorphic", a, c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not isomorphic"));
    let o = run(&["isomorphic", a, b]);
    assert_eq!(o.status.code(), Some(0));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["decision"], "isomorphic");
    assert_eq!(run(&["--float", "isomorphic", a, b]).status.code(), Some(0));
    assert_eq!(run(&["isomorphic", a, c, "--float", "1e-6"]).status.code(), Some(1));
}

#[test]
fn isomorphic_without_parameter_hints() {
    // stripping the params block forces the spectral path
    let strip = |name: &str, src: &PathBuf| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(src).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("params");
        let p = tmp(name);
        std::fs::write(&p, v.to_string()).unwrap();
        p
    };
    let a = strip("a_raw.json", &write_normal_form("a2.json", &["lorentz", "--f", "1,2"]));
    let b = strip("b_raw.json", &write_normal_form("b2.json", &["lorentz", "--f", "4,2"]));
    assert_eq!(run(&["isomorphic", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(0));
    let p = strip("p_raw.json", &write_normal_form("p.json", &["nil22", "--params", r#"{"eps_y": 1}"#]));
    let m = strip("m_raw.json", &write_normal_form("m.json", &["nil22", "--params", r#"{"eps_y": -1}"#]));
    let o = run(&["isomorphic", p.to_str().unwrap(), m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("unknown"));
}

#[test]
fn malformed_json_reports_position() {
    let p = tmp("bad.json");
    std::fs::write(&p, "{\"dim\": 3,\n  \"labels\": [\"a\", }").unwrap();
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn input_errors_exit_three() {
    let o = run(&["center", "--f", "1,x"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("list entry 2"));
    assert_eq!(run(&["normal-form", "nope"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "/nonexistent/file.json"]).status.code(), Some(3));
    assert_eq!(run(&["--float", "-1", "invariants"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn center_and_metric() {
    let o = run(&["center", "--f", "-1,-4"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "Z_times_lattice");
    assert_eq!(v["lambda_coeff"], "1");
    for f in ["1,-1", "-1,-2"] {
        let v: Value = serde_json::from_str(&stdout(&run(&["center", "--f", f]))).unwrap();
        assert_eq!(v["kind"], "Z_only");
    }
    let o = run(&["metric-eval", "--f", "3/2", "--point", "2,5,-1"]);
    let g: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(g[2][2], "-12");
    assert_eq!(g[1][2], "1");
}

#[test]
fn enumerate_nil22_census() {
    let o = run(&["enumerate", "--p", "2", "--q", "2", "--values", "-2,-1,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
}

#[test]
fn decompose_and_invariants() {
    let p = write_normal_form("iv.json", &["iv"]);
    let o = run(&["decompose", p.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims = v["dims"].as_array().unwrap();
    assert_eq!(dims.len(), 2);
    assert_eq!(dims[1]["w"], 1);
    assert_eq!(dims[1]["e"], 1);
    let a = write_normal_form("inv.json", &["lorentz", "--f", "1,2"]);
    let o = bin().args(["invariants", a.to_str().unwrap(), "--float"]).env("TRIPLEKIT_FLOAT_TOL", "1e-3").output().unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spectrum"]["tolerance"], 1e-3);
    assert_eq!(v["spectrum"]["exact"], false);
    let o = run(&["invariants", a.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spectrum"]["exact"], true);
}

#[test]
fn output_round_trips() {
    let p = write_normal_form("rt.json", &["iii"]);
    let first = std::fs::read_to_string(&p).unwrap();
    let v: Value = serde_json::from_str(&first).unwrap();
    let params = v["params"].to_string();
    let q = write_normal_form("rt2.json", &["iii", "--params", &params]);
    assert_eq!(first, std::fs::read_to_string(&q).unwrap());
}
