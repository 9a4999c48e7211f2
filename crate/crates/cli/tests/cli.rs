use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn onebit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .env_remove("ONEBIT_THREADS")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const SWEEP_SPEC: &str = r#"{
  "n": 16, "s": 2,
  "set": {"variant": "eff_sparse", "n": 16, "s": 2},
  "quantizer": {"variant": "bit_flip", "p": 0.9},
  "m_grid": [20, 40, 80],
  "trials_per_m": 3,
  "solver": {"max_iters": 400},
  "base_seed": 5
}"#;

#[test]
fn lambda_record_shape() {
    let v = json_stdout(&onebit(&["lambda", "--quantizer", "sign"]));
    assert!((v["value"].as_f64().unwrap() - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    assert_eq!(v["std_error"], 0.0);
    assert_eq!(v["method"], "closed_form");
    assert!(v["seed"].is_null());

    let v = json_stdout(&onebit(&[
        "lambda",
        "--quantizer",
        "bit_flip:0.75",
        "--method",
        "monte-carlo",
        "--samples",
        "20000",
        "--seed",
        "3",
    ]));
    assert_eq!(v["seed"], 3);
    assert!(v["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn mu_and_c2() {
    let v = json_stdout(&onebit(&["mu", "--quantizer", "sign"]));
    assert_eq!(v["value"], 1.0);
    let v = json_stdout(&onebit(&[
        "c2",
        "--quantizer",
        "sign",
        "--samples",
        "2000",
        "--bins",
        "10",
    ]));
    assert_eq!(v["value"], 1.0);
}

#[test]
fn width_of_ball_and_effective_dimension() {
    let set = r#"{"variant": "l2_ball", "n": 50}"#;
    let v = json_stdout(&onebit(&["width", "--set", set, "--samples", "4000"]));
    let w = v["value"].as_f64().unwrap();
    assert!((w - 50f64.sqrt()).abs() < 0.2, "{w}");
    let v = json_stdout(&onebit(&[
        "width",
        "--set",
        set,
        "--samples",
        "4000",
        "--effective-dim",
    ]));
    assert!((v["value"].as_f64().unwrap() - w * w / 4.0).abs() < 1e-9);
    let v = json_stdout(&onebit(&[
        "width",
        "--set",
        r#"{"variant": "l2_ball", "n": 3}"#,
        "--anchor",
        "[0, 0, 0]",
        "--t",
        "0.5",
        "--samples",
        "200",
    ]));
    assert_eq!(v["method"], "monte_carlo_local_lower_bound");
}

#[test]
fn simulate_writes_dataset_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sim.json");
    write(
        &spec,
        r#"{"n": 8, "m": 200, "s": 2, "seed": 4, "quantizer": {"variant": "sign"},
            "set": {"variant": "eff_sparse", "n": 8, "s": 2}}"#,
    );
    let out = dir.path().join("data");
    let v = json_stdout(&onebit(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert!(v["error"].as_f64().unwrap() < 1.0);
    for f in ["A.csv", "y.csv", "dataset.json", "estimate.json", "trace.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let est: Value = serde_json::from_str(&fs::read_to_string(out.join("estimate.json")).unwrap()).unwrap();
    assert_eq!(est["x_hat"].as_array().unwrap().len(), 8);
    let y = fs::read_to_string(out.join("y.csv")).unwrap();
    assert_eq!(y.lines().count(), 200);
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(&spec, SWEEP_SPEC);
    let run = |name: &str, threads: Option<&str>, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_onebit"));
        cmd.args([
            "sweep",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .args(extra);
        match threads {
            Some(t) => cmd.env("ONEBIT_THREADS", t),
            None => cmd.env_remove("ONEBIT_THREADS"),
        };
        let status = cmd.output().unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        fs::read(out.join("records.csv")).unwrap()
    };
    let a = run("a", None, &[]);
    let b = run("b", Some("2"), &[]);
    let c = run("c", None, &["--sequential"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("m,trial,seed,error,objective,wall_time_ms\n"));
    assert_eq!(text.lines().count(), 1 + 9);
    for f in ["summary.csv", "spec.json", "fit.json"] {
        assert!(dir.path().join("a").join(f).exists());
    }
}

#[test]
fn mu_sweep_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(
        &spec,
        r#"{"n": 16, "s": 2, "set": {"variant": "scaled_l1_ball", "n": 16, "radius": 1.4142135623730951},
            "quantizer": {"variant": "sign"}, "trials_per_m": 2, "mu_grid": [1, 1.5],
            "solver": {"max_iters": 300}, "base_seed": 1}"#,
    );
    let out = dir.path().join("out");
    let v = json_stdout(&onebit(&[
        "mu-sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(v["fit"]["regressor"], "mu");
    assert_eq!(v["summary"].as_array().unwrap().len(), 2);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    write(&spec, &SWEEP_SPEC.replace("[20, 40, 80]", "[40, 20]"));
    let out = onebit(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));

    write(&spec, &SWEEP_SPEC.replace("0.9", "0.4"));
    let out = onebit(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(
        onebit(&["lambda", "--quantizer", "bit_flip:1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(onebit(&["mu"]).status.code(), Some(2));

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(["mu", "--quantizer", "sign"])
        .env("ONEBIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sim.json");
    write(
        &spec,
        r#"{"n": 4, "m": 20, "seed": 1, "quantizer": {"variant": "sign"},
            "set": {"variant": "scaled_l1_ball", "n": 4, "radius": 1.7e308}, "solver": {"step0": 1.7e308}}"#,
    );
    let out = onebit(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}
