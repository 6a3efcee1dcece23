use std::process::Command;

use serde_json::Value;

fn nld(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nld"))
        .args(args)
        .env_remove("NLD_THREADS")
        .output()
        .expect("run nld");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON")
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

#[test]
fn density_anchor_from_file() {
    let dir = std::env::temp_dir().join(format!("nld-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("single_triangle_sigma2.json");
    std::fs::write(&path, r#"{"family": "triangle", "sigma": 2}"#).unwrap();
    let (code, out, _) = nld(&["density", "--n", "1", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "density");
    assert_eq!(v["status"], "pass");
    assert!((v["outputs"]["theorem"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(v["outputs"]["theorem"]["error"].is_number());
    assert_eq!(v["inputs"]["tol"], 1e-6);
}

#[test]
fn support_violation_is_usage_error() {
    let (code, out, err) = nld(&["density", "--n", "1", "--config", r#"{"family":"triangle","sigma":2.5}"#]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("support condition"), "{err}");
    assert!(err.contains("Σσ = 2.5"), "{err}");
    let (code, _, err) = nld(&[
        "density",
        "--config",
        r#"[{"family":"bump","sigma":1.2},{"family":"bump","sigma":1.1}]"#,
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("Σσ"), "{err}");
}

#[test]
fn malformed_input_is_usage_error() {
    for args in [
        vec!["density", "--config", "{\"family\":\"triangle\""],
        vec!["density", "--config", r#"{"family":"square","sigma":1}"#],
        vec!["density", "--n", "2", "--config", r#"[{"family":"triangle","sigma":1}]"#],
        vec!["density", "--config", "/nonexistent/config.json"],
        vec!["density", "--bogus", "--config", "{}"],
        vec!["no-such-command"],
        vec!["empirical", "--x", "1e4", "--sigma", "1.5", "--eps", "often"],
    ] {
        let (code, _, err) = nld(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn rmt_integral_reports_value_and_error() {
    let (code, out, _) = nld(&["rmt-integral", "--n", "2", "--config", r#"{"family":"triangle","sigma":0.9}"#]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["outputs"]["n"]["value"], 2.0);
    assert!(v["outputs"]["value"]["error"].as_f64().unwrap() <= 1e-6);
    assert!(v["outputs"]["est_error"]["exact"].as_bool().unwrap());
}

#[test]
fn density_both_sides_agree() {
    let (code, out, _) = nld(&[
        "density",
        "--side",
        "both",
        "--tol",
        "1e-5",
        "--config",
        r#"[{"family":"triangle","sigma":0.4},{"family":"bump","sigma":1.5}]"#,
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert!(v["outputs"]["difference"]["value"].as_f64().unwrap().abs() < 1e-5);
    assert_eq!(v["inputs"]["tol"], 1e-5);
}

#[test]
fn verify_corollary_n1() {
    let (code, out, _) = nld(&["verify-corollary", "--n", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert!(v["outputs"]["max_difference"]["value"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn unattainable_tolerance_fails() {
    let (code, out, _) = nld(&["verify-gauss", "--kmax", "99", "--mmax", "3", "--tol", "0"]);
    let v = json(&out);
    if v["outputs"]["max_error"]["value"].as_f64().unwrap() > 0.0 {
        assert_eq!(code, 1);
        assert_eq!(v["status"], "fail");
    }
}

#[test]
fn every_number_is_tagged() {
    fn walk(v: &Value) {
        if let Some(o) = v.as_object() {
            if o.contains_key("value") {
                assert!(o.contains_key("error") || o.get("exact") == Some(&Value::Bool(true)), "{v}");
            }
            o.values().for_each(walk);
        } else if let Some(a) = v.as_array() {
            a.iter().for_each(walk);
        }
    }
    let (_, out, _) = nld(&["verify-poisson"]);
    let v = json(&out);
    walk(&v["outputs"]);
    walk(&v["rows"]);
    let (_, out, _) = nld(&["empirical", "--x", "2e3", "--sigma", "1.5"]);
    let v = json(&out);
    walk(&v["outputs"]);
    walk(&v["rows"]);
}

#[test]
fn empirical_auto_parameters_and_sweep_csv() {
    let (code, out, _) = nld(&["empirical", "--n", "1", "--x", "2e3", "--sigma", "1.5", "--family", "triangle"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    for key in ["X", "normalized_sum", "predicted_limit", "gap"] {
        assert!(v["outputs"][key]["value"].is_number(), "{key}");
    }
    let echo = &v["inputs"]["X=2000"];
    assert!(echo["source"]["epsilon"].as_str().unwrap().contains("fallback"));
    assert!((echo["epsilon"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let (code, out, _) = nld(&["empirical", "--sweep", "1e3,3e3", "--sigma", "1.5", "--csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("label,X,X_error,gap"));
    assert!(lines[1].starts_with("X=1000,1000,exact,"));
}

#[test]
fn empirical_cost_guard() {
    let (code, _, err) = nld(&["empirical", "--x", "1e6", "--sigma", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("cost guard"), "{err}");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["verify-corollary", "--n", "2"];
    let runs: Vec<Value> = ["1", "3"]
        .iter()
        .map(|t| {
            let mut a = args.to_vec();
            a.extend(["--threads", t]);
            without_wall_time(json(&nld(&a).1))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let a = without_wall_time(json(&nld(&["verify-mobius", "--seed", "7", "--threads", "1"]).1));
    let b = without_wall_time(json(&nld(&["verify-mobius", "--seed", "7", "--threads", "2"]).1));
    assert_eq!(a, b);
    assert_eq!(a["inputs"]["seed"], 7);
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nld"))
        .args(["verify-mobius", "--nmax", "3"])
        .env("NLD_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = nld(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["density", "rmt-integral", "empirical", "verify-gauss", "verify-mobius", "verify-poisson", "verify-corollary"] {
        assert!(out.contains(sub), "{sub}");
    }
}
