use std::process::{Command, Output};

use serde_json::Value;

fn gkpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkpsim")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn states_csv_is_normalized() {
    let out = gkpsim(&["states", "--d", "2", "--kappa", "0.2", "--j", "0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    for key in ["d=2", "j=0", "envelope=gaussian", "kappa=0.2", "delta=", "eps=0.25", "points=20001"] {
        assert!(header.contains(key), "{header}");
    }
    assert_eq!(lines.next(), Some("x,re,im"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 20001);
    let dx = rows[1][0] - rows[0][0];
    let norm2: f64 = rows.iter().map(|r| r[1] * r[1] + r[2] * r[2]).sum();
    assert!((norm2 * dx - 1.0).abs() < 1e-3, "{}", norm2 * dx);
}

#[test]
fn states_rejects_bad_codeword_index() {
    let out = gkpsim(&["states", "--d", "2", "--kappa", "0.2", "--j", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("j = 2"), "{err}");
}

#[test]
fn comb_state_has_default_peak_count() {
    let out = gkpsim(&["states", "--d", "2", "--envelope", "comb", "--delta", "0.0625", "--points", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["params"]["L"], 64);
    assert_eq!(v["params"]["peaks"], 64);
}

#[test]
fn melem_examples_pass() {
    let out = gkpsim(&["melem", "--gate", "cx", "--l", "2", "--kappa", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v = json_of(&out);
    assert_eq!(v["pass"], true);
    let m = &v["results"][0]["elements"];
    assert_eq!(m["rows"].as_u64().unwrap() * m["cols"].as_u64().unwrap(), 64);

    let out = gkpsim(&["melem", "--gate", "lsb", "--l", "3", "--kappa", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let out = gkpsim(&["melem", "--gate", "embed", "--l", "2", "--kappa", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let check = &json_of(&out)["results"][0]["checks"][0];
    assert!(check["measured"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn melem_sweep_keeps_grid_order() {
    let out = gkpsim(&["melem", "--gate", "cx", "--l", "1,2", "--kappa", "0.2,0.1", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let got: Vec<(u64, f64)> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["l"].as_u64().unwrap(), r["kappa"].as_f64().unwrap()))
        .collect();
    assert_eq!(got, vec![(1, 0.2), (1, 0.1), (2, 0.2), (2, 0.1)]);
}

#[test]
fn failed_check_exits_one_and_names_the_bound() {
    let out = gkpsim(&["melem", "--gate", "comb-shift", "--d", "2", "--L", "16", "--delta", "0.01", "--eps", "0.25"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.starts_with("check failed: comb shift d=2 L=16"), "{err}");
    assert_eq!(json_of(&out)["pass"], false);
}

#[test]
fn comb_momentum_passes() {
    let out = gkpsim(&["melem", "--gate", "comb-momentum", "--z", "2", "--L", "16", "--delta", "0.01", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
}

#[test]
fn verify_ideal_example() {
    let out = gkpsim(&["verify-ideal", "--l", "4", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v = json_of(&out);
    assert_eq!(v["transfer_mismatches"], 0);
    assert_eq!(v["transfer_states_checked"], 4 * 32);
}

#[test]
fn count_example() {
    let out = gkpsim(&["count", "--circuit", "transfer", "--l", "5", "--j", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v = json_of(&out);
    assert_eq!(v["budget"]["count"], 2125);
    assert!(v["count"].as_u64().unwrap() <= 2125);
    assert!(v["logical_maps"].as_u64().unwrap() <= 32);
}

#[test]
fn count_csv_lists_gate_kinds() {
    let out = gkpsim(&["count", "--circuit", "lsb", "--l", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,count\n"), "{text}");
    let total: usize = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert!(total <= 3 + 6);
}

#[test]
fn two_qubit_bound_example() {
    let out = gkpsim(&["bound", "--target", "twoqubit", "--l", "2", "--kappa", "0.01"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let r = &json_of(&out)["results"][0]["report"];
    assert_eq!(r["analytic_bound"]["value"], 8.0);
    assert_eq!(r["analytic_bound"]["vacuous"], true);
    let computed = r["corollary_bound"].as_f64().unwrap();
    assert!(computed.is_finite() && computed > 0.0 && computed < 8.0);
}

#[test]
fn closed_form_circuit_bound() {
    let out = gkpsim(&["bound", "--target", "circuit", "--l", "3", "--kappa", "0.001", "--T", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let b = json_of(&out)["analytic_bound"]["value"].as_f64().unwrap();
    assert!((b - 9.0 * 400.0 * 3.0 * 0.001).abs() < 1e-12);
}

#[test]
fn clifford_factorization() {
    let out = gkpsim(&["clifford", "--name", "p", "--l", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v = json_of(&out);
    assert_eq!(v["two_qubit_gates"], 9);
    assert!(v["decomposition_error"].as_f64().unwrap() < 1e-10);
    let out = gkpsim(&["clifford", "--name", "x", "--l", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["crosscheck", "--cases", "12", "--seed", "3"];
    let a = gkpsim(&[&args[..], &["--workers", "1"]].concat());
    let b = gkpsim(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let a = gkpsim(&["bound", "--target", "qcx", "--l", "1,2", "--kappa", "0.1"]);
    let b = gkpsim(&["bound", "--target", "qcx", "--l", "1,2", "--kappa", "0.1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("gkpsim-cli-{}.json", std::process::id()));
    let out = gkpsim(&["count", "--circuit", "qcx", "--l", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["command"], "count");
    assert_eq!(v["count"], 1);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["count", "--circuit", "qcx"][..],
        &["count", "--circuit", "qcx", "--l", "0"],
        &["melem", "--gate", "cx", "--l", "2"],
        &["melem", "--gate", "cx", "--l", "2", "--kappa", "-0.1"],
        &["bound", "--target", "transfer", "--l", "2", "--kappa", "0.1", "--j", "2"],
        &["frobnicate"],
        &["states", "--d", "2", "--kappa", "0.1", "--format", "xml"],
    ] {
        let out = gkpsim(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr_of(&out));
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(gkpsim(&["--help"]).status.code(), Some(0));
}
