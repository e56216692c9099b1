//! End-to-end tests of the batch front end: exit codes, report shape, and
//! byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypolib"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

const RAMP_CSV: &str = "x1,value\n-1,1\n-0.5,0.5\n0,0\n0.5,0.5\n1,1\n";

#[test]
fn dist_of_identical_functions_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, RAMP_CSV);
    let out = run(&["dist", "--f", a.to_str().unwrap(), "--g", a.to_str().unwrap(), "--tol", "1e-6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["version"], "hypolib-v1");
    assert!(v["results"]["dl"]["value"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn dist_missing_file_exits_2() {
    let out = run(&["dist", "--f", "missing.csv", "--g", "missing.csv", "--tol", "1e-4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dist_mismatched_domains_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write(&a, RAMP_CSV);
    write(&b, "x1,value\n-1,0\n0,0\n1,0\n");
    let out = run(&["dist", "--f", a.to_str().unwrap(), "--g", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_csv_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, "x1,value\n0,zero\n");
    let out = run(&["dist", "--f", a.to_str().unwrap(), "--g", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "diagnostic missing: {err}");
}

#[test]
fn pack_desk_instance() {
    let out = run(&["approx", "pack", "--rho", "1", "--eps", "0.03", "--n", "1", "--verify"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["members"], 64);
    assert_eq!(v["results"]["separation"]["separated"], true);
    assert_eq!(v["results"]["separation"]["pairCount"], 2016);
}

#[test]
fn cover_reports_constants() {
    let out = run(&["approx", "cover", "--eps", "0.05", "--r", "2", "--omega", "1.001"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let c = v["results"]["c"].as_array().unwrap();
    assert_eq!(c.len(), 7);
    assert!((c[0].as_f64().unwrap() - 3.0).abs() < 1e-12);
    // compatibility mode needs an explicit eps-bar
    let bad = run(&["approx", "cover", "--eps", "0.005", "--r", "3.22", "--omega", "1e-8"]);
    assert_eq!(bad.status.code(), Some(2));
    let ok = run(&[
        "approx", "cover", "--eps", "0.005", "--r", "3.22", "--omega", "1e-8", "--eps-bar", "0.01",
    ]);
    assert!(ok.status.success());
}

fn estimation_fixture(dir: &Path) -> (String, String) {
    let u = dir.join("u.csv");
    let v = dir.join("v.csv");
    write(&u, "x1,value\n-1,-10\n0,-10\n1,-10\n");
    write(&v, "x1,value\n-1,10\n0,10\n1,10\n");
    let class = dir.join("class.json");
    write(
        &class,
        r#"{"schema":"hypolib-v1","type":"function_class","lowerCsv":"u.csv","upperCsv":"v.csv","lipschitz":0.0}"#,
    );
    let data = dir.join("sample.csv");
    write(&data, "x1,y\n0,1\n0,2\n0,3\n0,2\n");
    (class.display().to_string(), data.display().to_string())
}

#[test]
fn estimate_constants_regression_hits_mean_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (class, data) = estimation_fixture(dir.path());
    let out_csv = dir.path().join("fhat.csv");
    let args = [
        "estimate", "--objective", "ls", "--data", &data, "--class", &class,
        "--out", out_csv.to_str().unwrap(), "--seed", "7", "--max-iter", "4000",
    ];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let fhat1 = fs::read_to_string(&out_csv).unwrap();
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");
    assert_eq!(fhat1, fs::read_to_string(&out_csv).unwrap());

    let fhat = hypolib::GridFn::read_csv_str(&fhat1).unwrap();
    for v in fhat.values() {
        assert!((v.to_f64() - 2.0).abs() < 1e-6, "{}", v.to_f64());
    }
}

#[test]
fn estimate_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (class, data) = estimation_fixture(dir.path());
    let out_csv = dir.path().join("fhat.csv");
    let out = run(&[
        "estimate", "--objective", "ls", "--data", &data, "--class", &class,
        "--out", out_csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_fills_gaps_but_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write(&a, RAMP_CSV);
    write(&b, "x1,value\n-1,2\n-0.5,1.5\n0,1\n0.5,1.5\n1,2\n");
    let cfg = dir.path().join("cfg.json");
    write(
        &cfg,
        &format!(
            r#"{{"f":"{}","g":"{}","tol":1e-3}}"#,
            a.display(),
            a.display()
        ),
    );
    // config alone: g = a, so distance 0
    let from_cfg = run(&["dist", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    assert!(json_of(&from_cfg)["results"]["dl"]["value"].as_f64().unwrap() <= 1e-3);
    // flag overrides g: the shifted pair is clearly apart
    let with_flag = run(&["dist", "--config", cfg.to_str().unwrap(), "--g", b.to_str().unwrap()]);
    assert!(with_flag.status.success());
    let dl = json_of(&with_flag)["results"]["dl"]["value"].as_f64().unwrap();
    assert!(dl > 0.2, "flag must win over config, dl {dl}");
}

#[test]
fn confidence_membership() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cand.csv");
    write(&f, "x1,value\n-1,0\n0,0\n1,0\n");
    let data = dir.path().join("sample.csv");
    write(&data, "x1,y\n0,1\n0,-1\n");
    let out = run(&[
        "confidence", "--objective", "ls", "--data", data.to_str().unwrap(),
        "--f", f.to_str().unwrap(), "--delta", "1.25",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["member"], true);
    assert!((v["results"]["sampleAverage"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn pipeline_writes_stage_functions() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.csv");
    let mut csv = String::from("x1,value\n");
    let n = 40;
    for k in -n..=n {
        let x = k as f64 / 20.0;
        csv.push_str(&format!("{x},{}\n", if x <= 0.0 { 0.0 } else { -1.0 }));
    }
    write(&target, &csv);
    let sched = dir.path().join("sched.json");
    write(
        &sched,
        r#"{"schema":"hypolib-v1","type":"schedule","stages":[
            {"cap":null,"lambda":0.1,"rho":2.0,"q":2},
            {"cap":null,"lambda":0.01,"rho":2.0,"q":4}
        ]}"#,
    );
    let out_dir = dir.path().join("stages");
    let out = run(&[
        "approx", "pipeline", "--target", target.to_str().unwrap(),
        "--schedule", sched.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(),
        "--seed", "3", "--tol", "1e-3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let stages = v["results"].as_array().unwrap();
    assert_eq!(stages.len(), 2);
    for s in stages {
        let path = s["csv"].as_str().unwrap();
        assert!(Path::new(path).exists());
        hypolib::GridFn::read_csv_str(&fs::read_to_string(path).unwrap()).unwrap();
    }
}

#[test]
fn rate_experiment_runs_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.csv");
    let v = dir.path().join("v.csv");
    let fstar = dir.path().join("fstar.csv");
    write(&u, "x1,value\n-1,-5\n0,-5\n1,-5\n");
    write(&v, "x1,value\n-1,5\n0,5\n1,5\n");
    write(&fstar, "x1,value\n-1,0\n0,0\n1,0\n");
    let class = dir.path().join("class.json");
    write(
        &class,
        r#"{"schema":"hypolib-v1","type":"function_class","lowerCsv":"u.csv","upperCsv":"v.csv","lipschitz":0.0}"#,
    );
    let cfg = dir.path().join("rate.json");
    write(
        &cfg,
        r#"{
            "objective": "ls",
            "truth": {"kind": "regression", "support": [
                {"x": [0.0], "y": 1.0, "p": 0.5},
                {"x": [0.0], "y": -1.0, "p": 0.5}
            ]},
            "classJson": "class.json",
            "popArgminCsv": ["fstar.csv"],
            "nus": [20, 200],
            "replications": 6,
            "seed": 5,
            "dlTol": 1e-3
        }"#,
    );
    let report = dir.path().join("report.json");
    let csv = dir.path().join("points.csv");
    let out = run(&[
        "rate", "--config", cfg.to_str().unwrap(),
        "--out", report.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["results"]["slope"].as_f64().unwrap() < 0.0);
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("nu,medianGap"));
    assert_eq!(csv_text.lines().count(), 3);

    // identical invocation reproduces the report byte for byte
    let report2 = dir.path().join("report2.json");
    let out2 = run(&[
        "rate", "--config", cfg.to_str().unwrap(), "--out", report2.to_str().unwrap(),
    ]);
    assert!(out2.status.success());
    assert_eq!(
        fs::read_to_string(&report).unwrap(),
        fs::read_to_string(&report2).unwrap()
    );
}

#[test]
fn threads_flag_does_not_change_results() {
    let out1 = run(&["approx", "pack", "--rho", "1", "--eps", "0.03", "--n", "1", "--verify", "--threads", "1"]);
    let out4 = run(&["approx", "pack", "--rho", "1", "--eps", "0.03", "--n", "1", "--verify", "--threads", "4"]);
    assert!(out1.status.success() && out4.status.success());
    assert_eq!(out1.stdout, out4.stdout);
}

#[test]
fn infeasible_class_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.csv");
    let v = dir.path().join("v.csv");
    write(&u, "x1,value\n-1,0\n0,0\n1,0\n");
    write(&v, "x1,value\n-1,0.1\n0,0.1\n1,0.1\n");
    let class = dir.path().join("class.json");
    write(
        &class,
        r#"{"schema":"hypolib-v1","type":"function_class","lowerCsv":"u.csv","upperCsv":"v.csv","unitIntegral":true}"#,
    );
    let data = dir.path().join("sample.csv");
    write(&data, "x1\n0\n1\n");
    let out_csv = dir.path().join("fhat.csv");
    let out = run(&[
        "estimate", "--objective", "mle", "--data", data.to_str().unwrap(),
        "--class", class.to_str().unwrap(), "--out", out_csv.to_str().unwrap(), "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn threads_env_var_is_honored_as_fallback() {
    let out = bin()
        .env("HYPOLIB_THREADS", "2")
        .args(["approx", "pack", "--rho", "1", "--eps", "0.03", "--n", "1", "--verify"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let plain = run(&["approx", "pack", "--rho", "1", "--eps", "0.03", "--n", "1", "--verify"]);
    assert_eq!(out.stdout, plain.stdout);
}
