use std::path::Path;
use std::process::{Command, Output};

fn qpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

#[test]
fn table_one_csv() {
    let out = qpc(&["bm-prob", "--paper-table-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,m,eta=1,eta=0.99,eta=0.95,eta=0.90,eta=0.75,eta=0.50,eta=0.30")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("1,1,50.00,"));
    assert!(rows[1].starts_with("2,2,75.00,"));
}

#[test]
fn lossless_single_pair_is_half() {
    let out = qpc(&["bm-prob", "--code", "1,1", "--eta", "1"]);
    assert_eq!(stdout(&out), "n,m,eta=1\n1,1,50.00\n");
}

#[test]
fn output_is_byte_stable() {
    let args = ["optimize", "--distance-km", "1000", "--n-max", "12", "--m-max", "4", "--format", "json"];
    let a = qpc(&args);
    let b = qpc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_envelope() {
    let out = qpc(&["pmu-table", "--code", "3,3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "pmu-table");
    assert_eq!(v["results"][0]["p_mu_exact"][0], "7/8");
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["bm-prob", "--code", "1,1", "--eta", "1.5"][..],
        &["bm-prob", "--code", "0,3", "--eta", "1"],
        &["rate", "--code", "3,3", "--spacing-km", "2"],
        &["frobnicate"],
    ] {
        let out = qpc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(qpc(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rates.csv");
    let out = qpc(&[
        "rate",
        "--code",
        "23,5",
        "--distance-km",
        "1000",
        "--spacing-km",
        "2.36",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,m,spacing_km,rate,rate_pct,cost\n23,5,2.360000,"));
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("qpc.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"codes": ["2,2"], "eta": ["0.5", 1]}"#);
    let out = qpc(&["bm-prob", "--config", &cfg]);
    assert_eq!(stdout(&out), "n,m,eta=0.5,eta=1\n2,2,17.19,75.00\n");
    let out = qpc(&["bm-prob", "--config", &cfg, "--eta", "1"]);
    assert_eq!(stdout(&out), "n,m,eta=1\n2,2,75.00\n");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"colour": "blue"}"#);
    assert_eq!(qpc(&["bm-prob", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = qpc(&["verify", "--max-photons", "6", "--trials", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().skip(1).all(|l| l.contains(",PASS,")));
}
