use std::process::{Command, Output};

use serde_json::Value;

fn qtop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtop")).args(args).env_remove("QTOP_CONFIG").output().expect("qtop runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn fundamental_r_matrix_exact() {
    let out = qtop(&["construct", "rmatrix", "--n", "2", "--variant", "plus", "--backend", "exact"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["matrix"]["backend"], "exact");
    let e = v["matrix"]["entries"].as_array().unwrap();
    assert_eq!(e.len(), 16);
    // diagonal corner q^(1/2), the off-diagonal q^(1/2) - q^(-3/2)
    assert_eq!(e[0], serde_json::json!({"1/2": "1"}));
    assert_eq!(e[6], serde_json::json!({"-3/2": "-1", "1/2": "1"}));
}

#[test]
fn weyl_half_is_antidiagonal() {
    let v = json_of(&qtop(&["construct", "weyl", "--spin", "1/2"]));
    let e = v["matrix"]["entries"].as_array().unwrap();
    let re = |k: usize| e[k][0].as_f64().unwrap();
    assert_eq!((re(0), re(3)), (0.0, 0.0));
    assert!(re(1).abs() > 0.5 && re(2).abs() > 0.5);
    assert!(re(1) * re(2) < 0.0);
}

#[test]
fn cg_singlet_shape() {
    let v = json_of(&qtop(&["construct", "cg", "--j1", "1/2", "--j2", "1/2", "--j", "0"]));
    assert_eq!(v["shape"], serde_json::json!([1, 4]));
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 2);
}

#[test]
fn invalid_construct_params_are_usage_errors() {
    for args in [
        vec!["construct", "cg", "--j1", "1/2", "--j2", "1/2", "--j", "2"],
        vec!["construct", "cg", "--j1", "1/2", "--j2", "1/2"],
        vec!["construct", "rmatrix", "--variant", "sideways"],
        vec!["construct", "rmatrix", "--route", "universal", "--variant", "minus"],
    ] {
        let out = qtop(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).expect("structured error");
        assert_eq!(err["error"]["kind"], "usage");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [vec!["verify", "nope"], vec!["--q", "0.9", "verify", "ybe"], vec!["verify", "ybe", "--bogus"], vec![]]
    {
        assert_eq!(code(&qtop(&args)), 2, "{args:?}");
    }
}

#[test]
fn exact_ybe_rank_three() {
    let out = qtop(&["verify", "ybe", "--n", "3", "--backend", "exact"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let checks = v["checks"].as_array().unwrap();
    for c in checks.iter().filter(|c| c["id"].as_str().unwrap().starts_with("ybe.fundamental.n3")) {
        assert_eq!(c["residual"].as_f64(), Some(0.0));
        assert_eq!(c["pass"], true);
    }
    assert!(checks.iter().all(|c| !c["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn contravariant_numeric() {
    let out = qtop(&["verify", "contravariant", "--D", "12", "--q", "1.2", "--gamma", "0"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let rel = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "contravariant.relation").unwrap();
    assert!(rel["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn failing_checks_exit_one() {
    let out = qtop(&["verify", "rll", "--tol", "1e-300"]);
    assert_eq!(code(&out), 1);
    assert!(json_of(&out)["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn report_is_deterministic_across_worker_counts() {
    let a = qtop(&["verify", "scalars", "--workers", "1"]);
    let b = qtop(&["verify", "scalars", "--workers", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let ids: Vec<String> =
        json_of(&a)["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap().to_string()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn timing_only_on_request() {
    let plain = json_of(&qtop(&["verify", "rll"]));
    assert!(plain["checks"][0].get("wall_ms").is_none());
    let timed = json_of(&qtop(&["verify", "rll", "--timing"]));
    assert!(timed["checks"][0]["wall_ms"].as_f64().is_some());
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qtop.toml");
    std::fs::write(&path, "backend = \"exact\"\nn = 3\nD = 6\n").unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["verify", "invariants"];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_qtop")).args(&args).env("QTOP_CONFIG", &path).output().unwrap();
        json_of(&out)["config"].clone()
    };
    let from_file = run(&[]);
    assert_eq!(from_file["backend"], "exact");
    assert_eq!(from_file["n"], 3);
    assert_eq!(from_file["D"], 6);
    assert_eq!(from_file["q"], 1.2);
    let overridden = run(&["--n", "2", "--backend", "numeric"]);
    assert_eq!(overridden["backend"], "numeric");
    assert_eq!(overridden["n"], 2);
    assert_eq!(overridden["D"], 6);
}

#[test]
fn bad_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "unknown_key = 1\n").unwrap();
    let out =
        Command::new(env!("CARGO_BIN_EXE_qtop")).args(["verify", "ybe"]).env("QTOP_CONFIG", &path).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qtop(&["verify", "rll", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["summary"]["passed"].as_u64().unwrap() > 0);
}

#[test]
fn cgc_table_half_half() {
    let out = qtop(&["cgc-table", "--j1", "1/2", "--j2", "1/2"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let ch = v["channels"].as_array().unwrap();
    assert_eq!(ch.len(), 2);
    for c in ch {
        assert!(c["agreement"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn cgc_table_half_one_channels() {
    let v = json_of(&qtop(&["cgc-table", "--j1", "1/2", "--j2", "1"]));
    let js: Vec<&str> = v["channels"].as_array().unwrap().iter().map(|c| c["j"].as_str().unwrap()).collect();
    assert_eq!(js, ["1/2", "3/2"]);
}

#[test]
fn cgc_text_mirrors_json() {
    let v = json_of(&qtop(&["cgc-table", "--j1", "1/2", "--j2", "1/2"]));
    let text =
        String::from_utf8(qtop(&["cgc-table", "--j1", "1/2", "--j2", "1/2", "--format", "text"]).stdout).unwrap();
    for c in v["channels"].as_array().unwrap() {
        for e in c["entries"].as_array().unwrap() {
            let shown = format!("{:.15e}", e["direct"].as_f64().unwrap());
            assert!(text.contains(&shown), "{shown} missing from text table");
        }
    }
}

#[test]
fn cgc_table_rejects_large_spins() {
    assert_eq!(code(&qtop(&["cgc-table", "--j1", "9/2", "--j2", "1/2"])), 2);
}
