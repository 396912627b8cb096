use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn edgegas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgegas"))
        .args(args)
        .env_remove("EDGEGAS_CONFIG")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn electro_examples() {
    let out = edgegas(&["electro", "hard", "--beta", "2", "--n", "0", "--a", "0", "--t", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["log_e"], -2.0);

    let out = edgegas(&["electro", "soft", "--beta", "2", "--n", "0", "--t", "2"]);
    let v = json(&out)["result"]["log_e"].as_f64().unwrap();
    assert!((v + 2.0 / 3.0).abs() < 1e-15);

    let out = edgegas(&["electro", "hard", "--n", "1000", "--t", "4"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_max = 0.6366"), "{err}");
}

#[test]
fn electro_usage_errors() {
    assert_eq!(code(&edgegas(&["electro", "hard", "--t", "-1"])), 2);
    assert_eq!(code(&edgegas(&["electro", "hard"])), 2);
    assert_eq!(code(&edgegas(&["electro", "soft", "--t", "1", "--a", "1"])), 2);
    assert_eq!(code(&edgegas(&["electro", "bulk", "--t", "1"])), 2);
}

#[test]
fn asym_examples() {
    let out = edgegas(&["asym", "hard", "--beta", "2", "--n", "0", "--a", "0"]);
    let terms = json(&out)["result"]["terms"].as_array().unwrap().clone();
    let nonzero: Vec<&Value> = terms.iter().filter(|t| t["coefficient"] != 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0]["power"], "1");
    assert_eq!(nonzero[0]["coefficient"], -0.25);

    let out = edgegas(&["asym", "soft", "--beta", "2", "--n", "0"]);
    let terms = json(&out)["result"]["terms"].clone();
    let find = |p: &str, log: bool| {
        terms.as_array().unwrap().iter().find(|t| t["power"] == p && t["with_log"] == log).unwrap()["coefficient"].as_f64().unwrap()
    };
    assert_eq!(find("3", false), -1.0 / 12.0);
    assert_eq!(find("3/2", false), 0.0);
    assert_eq!(find("0", true), -0.125);

    let out = edgegas(&["asym", "bulk", "--beta", "2", "--n", "0", "--rho", "1", "--eval-at", "2"]);
    let v = json(&out);
    let log = v["result"]["terms"].as_array().unwrap().iter().find(|t| t["with_log"] == true).unwrap()["coefficient"].clone();
    assert_eq!(log, -0.25);
    assert!(v["result"]["evaluation"]["value"].is_f64());

    assert_eq!(code(&edgegas(&["asym", "middle"])), 2);
    assert_eq!(code(&edgegas(&["asym", "soft", "--eval-at", "-1"])), 2);
}

#[test]
fn check_examples() {
    for args in [
        &["check", "duality", "--edge", "soft", "--beta", "2", "--n", "3"][..],
        &["check", "duality", "--edge", "hard", "--beta", "4", "--n", "1", "--a", "1"],
        &["check", "factorization", "--edge", "hard", "--n", "2", "--a", "1"],
    ] {
        let out = edgegas(args);
        assert_eq!(code(&out), 0, "{args:?}");
        let v = json(&out);
        assert_eq!(v["result"]["passed"], true);
        assert!(v["result"]["table"]["rows"].as_array().unwrap().iter().all(|r| r["residual"] == 0.0));
    }
    let out = edgegas(&["check", "duality", "--edge", "hard", "--beta", "0.5", "--n", "0"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative"));
}

#[test]
fn every_format_renders_and_json_round_trips() {
    for args in [
        &["electro", "soft", "--t", "3", "--n", "0.4", "--beta", "1.3"][..],
        &["asym", "hard", "--beta", "0.7", "--n", "2", "--a", "0.3"],
        &["check", "factorization", "--edge", "soft", "--n", "1"],
        &["mc", "--edge", "soft", "--N", "20", "--t=-1,0", "--samples", "300"],
        &["verify", "--group", "lemma2"],
    ] {
        let out = edgegas(args);
        assert_eq!(code(&out), 0, "{args:?}");
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "{args:?}");
        assert!(v["config"].is_object());

        let mut a = args.to_vec();
        a.extend(["--format", "csv"]);
        let csv = String::from_utf8(edgegas(&a).stdout).unwrap();
        assert!(csv.starts_with(&format!("# edgegas {} config=", args[0])), "{csv}");
        assert!(csv.lines().count() > 2);

        let mut a = args.to_vec();
        a.extend(["--format", "text"]);
        let txt = String::from_utf8(edgegas(&a).stdout).unwrap();
        assert!(txt.starts_with(&format!("edgegas {}", args[0])));
    }
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"edge": "hard", "beta": 4, "t": 10, "format": "json"}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();

    let out = edgegas(&["electro", "--config", cfg_s]);
    let v = json(&out);
    assert_eq!(v["config"]["beta"], 4.0);
    assert_eq!(v["result"]["log_e"], -5.0);

    // Flags win over the file.
    let out = edgegas(&["electro", "--config", cfg_s, "--beta", "2"]);
    let v = json(&out);
    assert_eq!(v["config"]["beta"], 2.0);
    assert_eq!(v["result"]["log_e"], -2.5);

    let out = Command::new(env!("CARGO_BIN_EXE_edgegas"))
        .args(["electro"])
        .env("EDGEGAS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(json(&out)["result"]["log_e"], -5.0);

    std::fs::write(&cfg, r#"{"bta": 4}"#).unwrap();
    assert_eq!(code(&edgegas(&["electro", "--config", cfg_s])), 2);
    assert_eq!(code(&edgegas(&["electro", "--config", "/nonexistent/x.json"])), 2);
}

#[test]
fn out_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.txt");
    let out = edgegas(&["asym", "soft", "--format", "text", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&p).unwrap().contains("log|t|"));
}

fn mc_files(dir: &Path, name: &str, extra: &[&str]) -> (String, String) {
    let prefix = dir.join(name);
    let mut args = vec!["mc", "--edge", "hard", "--N", "30", "--t", "0.5,2", "--samples", "5000", "--seed", "3", "--out"];
    args.push(prefix.to_str().unwrap());
    args.extend(extra);
    let out = edgegas(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (
        std::fs::read_to_string(prefix.with_extension("json")).unwrap(),
        std::fs::read_to_string(prefix.with_extension("csv")).unwrap(),
    )
}

#[test]
fn mc_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = mc_files(dir.path(), "a", &[]);
    let b = mc_files(dir.path(), "b", &["--threads", "1"]);
    let c = mc_files(dir.path(), "c", &["--threads", "3"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let v: Value = serde_json::from_str(&a.0).unwrap();
    assert_eq!(v["config"]["ensemble"], "laguerre");
    assert_eq!(v["result"]["complete"], true);
    assert!(v["result"].get("wall_seconds").is_none());
    assert!(a.1.lines().nth(1).unwrap() == "t,n,count,p_hat,stderr");
}

#[test]
fn mc_errors_and_options() {
    assert_eq!(code(&edgegas(&["mc", "--ensemble", "gaussian", "--edge", "hard", "--t", "1"])), 2);
    assert_eq!(code(&edgegas(&["mc", "--ensemble", "laguerre", "--a", "-5", "--edge", "hard", "--t", "1", "--samples", "10"])), 3);
    assert_eq!(code(&edgegas(&["mc", "--edge", "soft"])), 2);
    assert_eq!(code(&edgegas(&["mc", "--edge", "soft", "--t", "1", "--samples", "0"])), 2);

    let out = edgegas(&["mc", "--edge", "soft", "--N", "300", "--t", "-2", "--samples", "100000000", "--max-seconds", "0.2"]);
    assert_eq!(code(&out), 4);
    let v = json(&out);
    assert_eq!(v["result"]["complete"], false);

    let out = edgegas(&["mc", "--edge", "hard", "--N", "20", "--t-grid", "1,2", "--samples", "2000", "--record-timing", "--compare"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["result"]["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert!(v["result"]["comparison"]["rows"].is_array());
    assert_eq!(v["config"]["t"], serde_json::json!([1.0, 2.0]));
}

#[test]
fn verify_groups() {
    let out = edgegas(&["verify", "--group", "lemma2", "--format", "text"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = edgegas(&["verify", "--group", "lemma2"]);
    let g = &json(&out)["result"]["groups"][0];
    assert!(g["worst_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(code(&edgegas(&["verify", "--group", "nonsense"])), 2);
}

#[test]
fn verify_default_suite_passes() {
    let start = std::time::Instant::now();
    let out = edgegas(&["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(start.elapsed().as_secs() < 60);
    let v = json(&out);
    assert_eq!(v["result"]["groups"].as_array().unwrap().len(), edgegas_cli::verify::GROUPS.len());
}
