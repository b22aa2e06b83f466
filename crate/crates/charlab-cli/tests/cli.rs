use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_charlab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn charlab")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_subcommand_exits_1_with_usage() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "no usage text in: {stderr}");
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", r#"{"z": 10.0, "beta": 2.0, "zeta": 1}"#);
    let out = run(&["sieve-coeffs", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("zeta"), "field name missing from: {stderr}");
}

#[test]
fn missing_config_flag_errors() {
    let out = run(&["constants"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sieve_coeffs_writes_csv_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.json", r#"{"z": 10.0, "beta": 2.0}"#);
    let outdir = tmp.path().join("out");
    let out = run(&["sieve-coeffs", "--config", &cfg, "--out", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(outdir.join("sieve_coeffs.csv")).unwrap();
    assert!(csv.starts_with("experiment_id,d,lambda\n"));
    assert!(csv.lines().count() > 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "sieve-coeffs");
    assert!(manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "sieve_coeffs.csv"));
    // every data row carries the experiment id
    let id = manifest["experiment_id"].as_str().unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.starts_with(id), "row missing id: {line}");
    }
}

#[test]
fn rerun_produces_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{"seeds": [1,2], "n_values": [8,16,32], "k_max": 2,
            "f": {"name":"inv_tau","alpha":0.5,"rule":"inv_tau"}}"#,
    );
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&d1, &d2] {
        let out = run(&["bilinear", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        fs::read(d1.join("bilinear.csv")).unwrap(),
        fs::read(d2.join("bilinear.csv")).unwrap()
    );
}

#[test]
fn config_hash_ignores_whitespace_and_key_order() {
    let tmp = tempfile::tempdir().unwrap();
    let c1 = write(tmp.path(), "c1.json", r#"{"z": 10.0, "beta": 2.0}"#);
    let c2 = write(tmp.path(), "c2.json", "{\n  \"beta\": 2.0,\n  \"z\": 10.0\n}\n");
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&["sieve-coeffs", "--config", &c1, "--out", d1.to_str().unwrap()]);
    run(&["sieve-coeffs", "--config", &c2, "--out", d2.to_str().unwrap()]);
    let hash = |d: &Path| -> String {
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        m["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash(&d1), hash(&d2));
}

#[test]
fn verify_small_run_reports_zero_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.json", r#"{"z": 10.0, "beta": 2.0, "n_max": 2000}"#);
    let outdir = tmp.path().join("out");
    let out = run(&["verify", "--config", &cfg, "--out", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(outdir.join("verify.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.ends_with(",0"), "expected zero violations: {row}");
}

#[test]
fn table_cache_env_var_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let cfg = write(tmp.path(), "cfg.json", r#"{"z": 10.0, "beta": 2.0, "n_max": 1000}"#);
    let out = Command::new(BIN)
        .args(["verify", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()])
        .env("CHARLAB_TABLE_DIR", &cache)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(cache.join("spf-1000.u32le").exists());
}

#[test]
fn mainterm_emits_plot_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.json",
        r#"{"target": {"kind": "sw_principal", "r": 1, "q": "odd"},
            "x_grid": [1000, 10000, 100000]}"#,
    );
    let outdir = tmp.path().join("out");
    let out = run(&["mainterm", "--config", &cfg, "--out", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(outdir.join("mainterm.csv").exists());
    assert!(outdir.join("mainterm_trend.csv").exists());
    assert!(outdir.join("mainterm_trend_plot.py").exists());
}
