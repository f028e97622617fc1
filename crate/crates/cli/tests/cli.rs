//! End-to-end runs of the binary: exit codes, file contents and determinism.

use std::process::{Command, Output};

fn hyperhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperhs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn f_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = hyperhs(&["f-scan", "--case", "o21", "--points", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,value,err_est,n_evals,converged"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert!((f[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(f[4], "true");
    }
}

#[test]
fn f_scan_forms_agree_as_json() {
    for case in ["o22-double", "o22-phi1", "o3"] {
        let o = hyperhs(&["f-scan", "--case", case, "--points", "3", "--format", "json"]);
        assert_eq!(code(&o), 0, "{case}");
        let rows = json(&o);
        assert_eq!(rows.as_array().unwrap().len(), 3);
    }
}

#[test]
fn malformed_grid_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = hyperhs(&["f-scan", "--case", "o21", "--a-min", "5", "--a-max", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!path.exists());
    assert_eq!(code(&hyperhs(&["verify", "--case", "o21-special", "--grid", "1,x"])), 2);
    assert_eq!(code(&hyperhs(&["f-scan", "--case", "nope"])), 2);
    assert_eq!(code(&hyperhs(&["f-scan", "--case", "o21", "--tol", "-1"])), 2);
}

#[test]
fn exhausted_budget_is_a_numerical_failure() {
    let o = hyperhs(&["f-scan", "--case", "o21", "--points", "2", "--max-evals", "10"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_conjectured_measures_pass() {
    for case in ["o11", "o21-special", "o21-general", "o22-special"] {
        let o = hyperhs(&["verify", "--case", case]);
        assert_eq!(code(&o), 0, "{case}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["pass"], true, "{case}");
        assert!(r["max_rel_dev"].as_f64().unwrap() < 1e-3);
    }
}

#[test]
fn verify_naive_measures_fail_as_expected() {
    for case in ["o11", "o21-special"] {
        let o = hyperhs(&["verify", "--case", case, "--measure", "naive"]);
        assert_eq!(code(&o), 0, "{case}");
        let r = json(&o);
        assert_eq!(r["pass"], false);
        assert!(r["max_rel_dev"].as_f64().unwrap() > 0.05);
    }
    assert_eq!(code(&hyperhs(&["verify", "--case", "o3-tail", "--measure", "naive"])), 0);
}

#[test]
fn verify_rejects_inadmissible_sources() {
    assert_eq!(code(&hyperhs(&["verify", "--case", "o11", "--grid", "1,1,0;1,1,2"])), 2);
    assert_eq!(code(&hyperhs(&["verify", "--case", "o21-special", "--grid", "1,-1;-1,1"])), 2);
    assert_eq!(code(&hyperhs(&["verify", "--case", "o22-special", "--measure", "naive"])), 2);
}

#[test]
fn scaling_fits() {
    let o = hyperhs(&["scaling", "--case", "o21-naive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = hyperhs(&["scaling", "--case", "o22-naive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&hyperhs(&["scaling", "--case", "o22-naive", "--points", "1"])), 2);
}

#[test]
fn selftest_exit_codes() {
    assert_eq!(code(&hyperhs(&["selftest"])), 0);
    assert_eq!(code(&hyperhs(&["selftest", "--perturb-jacobian"])), 1);
    assert_eq!(code(&hyperhs(&["selftest", "--max-evals", "10"])), 3);
}

#[test]
fn output_is_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_hyperhs"))
            .args(["f-scan", "--case", "o22-phi1", "--points", "6"])
            .env("HYPERHS_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}
