use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn metaplex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metaplex"))
        .args(args)
        .env_remove("METAPLEX_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn cusps_of_level_four() {
    let out = metaplex(&["cusps", "--level", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["count"], 3);
    let singular: Vec<bool> = v["cusps"].as_array().unwrap().iter().map(|c| c["singular"].as_bool().unwrap()).collect();
    assert_eq!(singular, [true, false, true]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&metaplex(&["cusps", "--level", "6"])), 2);
    assert_eq!(code(&metaplex(&["cusps", "--weight", "1"])), 2);
    assert_eq!(code(&metaplex(&["no-such-command"])), 2);
    assert_eq!(code(&metaplex(&["cusps", "--csv"])), 2);
    assert_eq!(code(&metaplex(&["eval", "--z", "0.1,-1"])), 2);
}

#[test]
fn help_exits_zero() {
    let out = metaplex(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("check-lambda"));
}

#[test]
fn reports_are_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = metaplex(&["check-cocycle", "--pairs", "50", "--seed", "9", "-o", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ba, bb);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "{names:?}");
    let v: Value = serde_json::from_slice(&ba).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    for row in v["checks"].as_array().unwrap() {
        assert!(row["paper_ref"].as_str().unwrap().len() > 10);
        assert_eq!(row["pass"], true);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "level = 8\nseed = 4\n[tolerances]\ncocycle = 1e-10\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(json(&metaplex(&["cusps", "--config", c]))["count"], 4);
    assert_eq!(json(&metaplex(&["cusps", "--config", c, "--level", "4"]))["count"], 3);
    let v = json(&metaplex(&["check-cocycle", "--pairs", "10", "--config", c]));
    assert_eq!(v["checks"][0]["tol"], 1e-10);
    assert_eq!(v["checks"][0]["inputs"]["seed"], 4);

    std::fs::write(&cfg, "levle = 8\n").unwrap();
    let out = metaplex(&["cusps", "--config", c]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("levle"));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_metaplex"))
        .args(["check-cocycle", "--pairs", "5"])
        .env("METAPLEX_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_metaplex"))
        .args(["check-cocycle", "--pairs", "5"])
        .env("METAPLEX_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn csv_rows() {
    let out = metaplex(&["check-cocycle", "--pairs", "5", "--csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,paper_ref,residual,tol,pass,inputs");
    assert_eq!(lines.count(), 2);
}

#[test]
fn eval_reports_values_and_tails() {
    let v = json(&metaplex(&["eval", "--z", "0.1,0.9", "--z", "0,1.2", "--index", "1"]));
    let rows = v["values"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["tail_estimate"].as_f64().unwrap() < 1e-3);
}

fn write(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_vec(v).unwrap()).unwrap();
}

#[test]
fn dataset_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("e.json");
    let out = metaplex(&["fourier", "--dataset", "-o", ds.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let fit = metaplex(&["fit-a", ds.to_str().unwrap()]);
    assert_eq!(code(&fit), 0);
    let a = &json(&fit)["checks"][0]["inputs"]["A"];
    assert!((a[0][0][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(a[0][1][0].as_f64().unwrap().abs() < 1e-6);

    // Scale a_1 of the first family by 1.1: the validator must fail.
    let mut v: Value = serde_json::from_slice(&std::fs::read(&ds).unwrap()).unwrap();
    for c in v["families"][0]["coeffs_at_w"].as_array_mut().unwrap() {
        if c["n"] == 1 {
            let re = c["re"].as_f64().unwrap();
            c["re"] = (1.1 * re).into();
        }
    }
    let bad = dir.path().join("bad.json");
    write(&bad, &v);
    let out = metaplex(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));

    v["families"][0]["coeffs_at_w"][0]["n"] = 0.into();
    write(&bad, &v);
    let out = metaplex(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("family 1"));
    assert_eq!(code(&metaplex(&["validate", "/nonexistent/x.json"])), 2);
}
