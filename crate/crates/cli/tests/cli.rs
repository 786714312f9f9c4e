use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_structrand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gowers_constant_and_code() {
    let r = report(&["gowers", "--gen", "const:5", "--d", "3"]);
    assert_eq!(r["schema"], "structrand-report/1");
    for u in r["certificate"]["norms"].as_array().unwrap() {
        assert!((u.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    let r = report(&["gowers", "--gen", "code:6:1", "--d", "2", "--seed", "3"]);
    assert!((r["certificate"]["norms"][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn gowers_transform_cross_check() {
    let r = report(&["gowers", "--gen", "random:8", "--seed", "42", "--d", "2"]);
    let c = &r["certificate"];
    assert!(c["u2_agreement"].as_f64().unwrap() <= 1e-9);
    assert_eq!(c["monotone"], true);
}

#[test]
fn decompose_eps_one_is_empty() {
    let r = report(&["decompose", "--gen", "random:6", "--eps", "1", "--normalize"]);
    assert_eq!(r["certificate"]["atom_count"], 0);
}

#[test]
fn decompose_echoes_arithmetic_growth() {
    let r = report(&[
        "decompose", "--gen", "random:6", "--normalize", "--mode", "strong", "--eps", "0.25",
        "--growth", "arith:0.25",
    ]);
    assert_eq!(r["certificate"]["growth"]["kind"], "arithmetic_regularity");
    assert_eq!(r["certificate"]["growth"]["eps"], 0.25);
    assert_eq!(r["config"]["growth"], "arith:0.25");
}

#[test]
fn reports_are_reproducible() {
    let args = ["decompose", "--gen", "random:7", "--seed", "9", "--normalize", "--mode", "orthogonal", "--eps", "0.2"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let g = ["graph-reg", "--gen", "gnp:64:0.5", "--seed", "5"];
    assert_eq!(run(&g).stdout, run(&g).stdout);
}

#[test]
fn arith_reg_on_coset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coset.json");
    let points: Vec<u32> = (0..64u32).filter(|x| (x & 0b1011).count_ones() % 2 == 0).collect();
    fs::write(&path, serde_json::json!({ "n": 6, "points": points }).to_string()).unwrap();
    let r = report(&["arith-reg", "--input", path.to_str().unwrap()]);
    let c = &r["certificate"];
    assert_eq!(c["codimension"], 1);
    assert!(c["cosets"].as_array().unwrap().iter().all(|x| x["regular"] == true));
}

#[test]
fn graph_reg_on_complete_bipartite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let mut text = String::from("64\n");
    for a in 0..32 {
        for b in 32..64 {
            text.push_str(&format!("{a} {b}\n"));
        }
    }
    fs::write(&path, text).unwrap();
    let r = report(&["graph-reg", "--input", path.to_str().unwrap(), "--eps", "0.3", "--m", "2"]);
    for p in r["certificate"]["pairs"].as_array().unwrap() {
        let d = p["density"].as_f64().unwrap();
        assert!(d == 0.0 || d == 1.0);
        assert_ne!(p["verdict"]["verdict"], "irregular");
    }
    let out = run(&["graph-reg", "--input", path.to_str().unwrap(), "--eps", "0.3", "--m", "2", "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("i,j,density,verdict,mode,max_relative_deviation\n"));
}

#[test]
fn inverse_recovers_planted_code() {
    let r = report(&["inverse", "--gen", "noisy-code:10:1:0.01", "--seed", "7", "--d", "2"]);
    assert_eq!(r["certificate"]["matches_planted"], true);
    assert!(r["input"]["planted"].is_object());
    let r = report(&["inverse", "--gen", "code:4:2", "--seed", "1", "--mode", "100", "--d", "3"]);
    assert_eq!(r["certificate"]["polynomial"], r["input"]["planted"]);
}

#[test]
fn sparse_demo_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sparse.json");
    let status = run(&["sparse-demo", "--seed", "2", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rep = &r["certificate"]["report"];
    assert_eq!(rep["passed"], true);
    assert!(rep["f_str_max"].as_f64().unwrap() <= 1.2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["decompose", "--gen", "random:4", "--eps", "2"]).status.code(), Some(2));
    assert_eq!(run(&["gowers", "--gen", "nonsense:3"]).status.code(), Some(2));
    let budget = run(&[
        "decompose", "--gen", "random:6", "--normalize", "--mode", "strong", "--eps", "0.1",
        "--growth", "linear:100", "--max-m", "10",
    ]);
    assert_eq!(budget.status.code(), Some(4));
    let unmet = run(&["graph-reg", "--gen", "gnp:24:0.5", "--mode", "exact"]);
    assert_eq!(unmet.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&unmet.stdout).unwrap();
    assert_eq!(r["status"], "unmet");
    assert!(r["certificate"]["pairs"].is_array());
}

#[test]
fn timing_is_opt_in() {
    let r = report(&["gowers", "--gen", "random:4"]);
    assert!(r.get("timing_ms").is_none());
    let r = report(&["gowers", "--gen", "random:4", "--timing"]);
    assert!(r["timing_ms"].is_number());
}

#[test]
fn input_and_gen_conflict() {
    let out = run(&["gowers", "--gen", "random:4", "--input", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
}
