use std::path::Path;
use std::process::Command;

use dcp_core::cli::{run, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dcp(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("dcp").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_sim(out: &str, extra: &[&str]) -> Outcome {
    let mut args = vec!["simulate", "--n", "30", "--p", "12", "--trials", "4", "--seed", "3", "--out", out];
    args.extend_from_slice(extra);
    dcp(&args)
}

#[test]
fn simulate_writes_one_row_per_method_and_size() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = small_sim(out, &["--alpha", "0.1", "--M", "5,10,20", "--methods", "oracle,cpdd,cpdm"]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "method,n,p,M,trials,coverage,coverage_se,mean_length,length_se,clipped_fraction,mean_fit_count,wall_time_s"
    );
    assert_eq!(lines.len(), 1 + 9);
    assert_eq!(lines.iter().filter(|l| l.starts_with("oracle,")).count(), 3);
    assert!(!csv.contains('"') && !csv.contains('\r'));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 12);
    }
    assert!(!dir.path().join("trials.csv").exists());
}

#[test]
fn simulate_is_byte_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        let res = small_sim(d.path().to_str().unwrap(), &["--M", "4,8", "--threads", "4", "--per-trial"]);
        assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    }
    for f in ["results.csv", "trials.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_per_trial_and_plots() {
    let dir = TempDir::new().unwrap();
    let res = small_sim(dir.path().to_str().unwrap(), &["--M", "4,8", "--per-trial", "--plot"]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let trials = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    // 5 default methods x 2 sizes x 4 trials
    assert_eq!(trials.lines().count(), 1 + 5 * 2 * 4);
    for f in ["coverage.svg", "length.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("cpdm"));
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["simulate", "--trials", "0", "--out", out],
        vec!["simulate", "--methods", "oracle,bogus", "--out", out],
        vec!["simulate", "--M", "5,x", "--out", out],
        vec!["simulate", "--M", "0", "--out", out],
        vec!["simulate", "--alpha", "1.5", "--out", out],
        vec!["simulate", "--p", "5", "--out", out],
        vec!["simulate", "--warm-start", "maybe"],
        vec!["simulate", "--no-such-flag"],
        vec!["frobnicate"],
    ] {
        let res = dcp(&args);
        assert_eq!(res.code, EXIT_USAGE, "{args:?}");
        assert!(!res.stderr.is_empty());
    }
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn help_exits_0() {
    let res = dcp(&["--help"]);
    assert_eq!(res.code, EXIT_OK);
    assert!(res.stdout.contains("simulate"));
}

#[test]
fn runtime_failure_exits_1() {
    let dir = TempDir::new().unwrap();
    let blocker = write(dir.path(), "file", "not a directory");
    let res = small_sim(&format!("{blocker}/sub"), &["--M", "4"]);
    assert_eq!(res.code, EXIT_RUNTIME);
    assert!(res.stderr.starts_with("error:"));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sim.cfg", "# desk run\nn = 25\np = 11\ntrials = 2\nM = 3, 6\nmethods = oracle\nalpha=0.2\n");
    let out = dir.path().to_str().unwrap();
    let res = dcp(&["simulate", "--config", &cfg, "--trials", "3", "--out", out]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    // method,n,p,M,trials: file supplies n, p and M; the flag wins for trials
    assert!(rows[0].starts_with("oracle,25,11,3,3,"), "{}", rows[0]);

    let bad = write(dir.path(), "bad.cfg", "n = 25\nthis line is wrong\n");
    let res = dcp(&["simulate", "--config", &bad, "--out", out]);
    assert_eq!(res.code, EXIT_USAGE);
    assert!(res.stderr.contains("line 2"), "{}", res.stderr);

    let unknown = write(dir.path(), "unknown.cfg", "colour = blue\n");
    assert_eq!(dcp(&["simulate", "--config", &unknown, "--out", out]).code, EXIT_USAGE);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(dcp(&["simulate", "--config", missing.to_str().unwrap(), "--out", out]).code, EXIT_RUNTIME);
}

#[test]
fn predict_single_row_is_unbounded() {
    let dir = TempDir::new().unwrap();
    let train = write(dir.path(), "train.csv", "x1,y\n1.0,2.0\n");
    for method in ["cpdd", "cpdm"] {
        let res = dcp(&["predict", "--train", &train, "--x", "0.5", "--method", method, "--alpha", "0.1"]);
        assert_eq!(res.code, EXIT_OK, "{method}: {}", res.stderr);
        assert!(res.stdout.contains("hull: (-inf,inf)"), "{method}: {}", res.stdout);
    }
    // The padded grid keeps the approximate set bounded even though every point is accepted.
    let res = dcp(&["predict", "--train", &train, "--x", "0.5", "--method", "approximate"]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert!(res.stdout.contains("hull: (1.47"), "{}", res.stdout);
    // Split needs two rows.
    let res = dcp(&["predict", "--train", &train, "--x", "0.5", "--method", "split"]);
    assert_eq!(res.code, EXIT_RUNTIME);
}

#[test]
fn predict_reports_bad_cell_line() {
    let dir = TempDir::new().unwrap();
    let train = write(dir.path(), "train.csv", "x1,x2,y\n1,2,3\n4,five,6\n");
    let res = dcp(&["predict", "--train", &train, "--x", "1,2"]);
    assert_eq!(res.code, EXIT_RUNTIME);
    assert!(res.stderr.contains("line 3"), "{}", res.stderr);

    let ragged = write(dir.path(), "ragged.csv", "x1,y\n1,2\n3,4\n5\n");
    let res = dcp(&["predict", "--train", &ragged, "--x", "1"]);
    assert_eq!(res.code, EXIT_RUNTIME);
    assert!(res.stderr.contains("line 4"), "{}", res.stderr);

    let headless = write(dir.path(), "headless.csv", "1,2\n3,4\n");
    let res = dcp(&["predict", "--train", &headless, "--x", "1"]);
    assert_eq!(res.code, EXIT_RUNTIME);
    assert!(res.stderr.contains("header"));
}

#[test]
fn predict_constant_responses_single_cell() {
    let dir = TempDir::new().unwrap();
    let train = write(dir.path(), "train.csv", "x1,y\n1,4\n2,4\n3,4\n4,4\n5,4\n");
    let res = dcp(&["predict", "--train", &train, "--x", "2.5", "--method", "cpdd", "--M", "1"]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert!(res.stdout.contains("hull: (-inf,inf)"), "{}", res.stdout);
}

#[test]
fn predict_dimension_mismatch() {
    let dir = TempDir::new().unwrap();
    let train = write(dir.path(), "train.csv", "x1,x2,y\n1,2,3\n2,1,4\n");
    let res = dcp(&["predict", "--train", &train, "--x", "1,2,3"]);
    assert_eq!(res.code, EXIT_RUNTIME);
    assert!(res.stderr.contains("dimension"), "{}", res.stderr);
}

fn linear_train(dir: &Path) -> String {
    let mut s = String::from("x1,y\n");
    for i in 1..=20 {
        let noise = if i % 2 == 0 { 0.25 } else { -0.25 };
        s.push_str(&format!("{i},{}\n", i as f64 + noise));
    }
    write(dir, "linear.csv", &s)
}

#[test]
fn predict_json_shape() {
    let dir = TempDir::new().unwrap();
    let train = linear_train(dir.path());
    let args = ["predict", "--train", &train, "--x", "10.5", "--method", "cpdm", "--fitter", "ridge", "--lambda", "0.001", "--json"];
    let res = dcp(&args);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let v: serde_json::Value = serde_json::from_str(res.stdout.trim()).unwrap();
    assert!(res.stdout.starts_with("{\"intervals\":"));
    assert_eq!(v["method"], "cpdm");
    assert_eq!(v["alpha"], 0.1);
    let hull = v["hull"].as_array().unwrap();
    let (lo, hi) = (hull[0].as_f64().unwrap(), hull[1].as_f64().unwrap());
    assert!(lo < 10.5 && 10.5 < hi && hi - lo < 5.0);
    assert!(!v["intervals"].as_array().unwrap().is_empty());

    let one = write(dir.path(), "one.csv", "x1,y\n1,1\n");
    let res = dcp(&["predict", "--train", &one, "--x", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(res.stdout.trim()).unwrap();
    assert_eq!(v["hull"], serde_json::json!(["-inf", "inf"]));
}

#[test]
fn predict_reads_covariate_file() {
    let dir = TempDir::new().unwrap();
    let train = linear_train(dir.path());
    let xs = write(dir.path(), "test.csv", "x1\n3\n15\n");
    let res = dcp(&["predict", "--train", &train, "--x", &xs, "--method", "split", "--fitter", "ridge", "--lambda", "0.001"]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert_eq!(res.stdout.lines().filter(|l| l.starts_with("hull: ")).count(), 2);
}

#[test]
fn predict_usage_errors() {
    let dir = TempDir::new().unwrap();
    let train = linear_train(dir.path());
    for args in [
        vec!["predict", "--train", train.as_str(), "--x", "1", "--method", "magic"],
        vec!["predict", "--train", train.as_str(), "--x", "1", "--alpha", "0"],
        vec!["predict", "--train", train.as_str(), "--x", "1", "--M", "0"],
        vec!["predict", "--train", train.as_str(), "--x", "one"],
        vec!["predict", "--x", "1"],
    ] {
        assert_eq!(dcp(&args).code, EXIT_USAGE, "{args:?}");
    }
    let missing = dir.path().join("nope.csv");
    assert_eq!(dcp(&["predict", "--train", missing.to_str().unwrap(), "--x", "1"]).code, EXIT_RUNTIME);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dcp");
    let status = Command::new(bin).args(["simulate", "--trials", "0"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    let status = Command::new(bin).args(["predict", "--train", "/nonexistent/x.csv", "--x", "1"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_RUNTIME));
    let status = Command::new(bin).arg("--version").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
}
