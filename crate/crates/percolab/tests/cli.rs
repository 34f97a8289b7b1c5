mod common;

use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_percolab");

#[test]
fn every_subcommand_without_arguments_prints_usage() {
    for case in common::CLI_CASES {
        let out = Command::new(BIN).arg(case[0]).output().unwrap();
        assert!(!out.status.success(), "{}", case[0]);
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{}", case[0]);
    }
    assert!(!Command::new(BIN).output().unwrap().status.success());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (i, case) in common::CLI_CASES.iter().enumerate() {
        let (ca, a, ma) = common::run_cli(BIN, case, dir.path(), &format!("a{i}"));
        let (cb, b, mb) = common::run_cli(BIN, case, dir.path(), &format!("b{i}"));
        assert_eq!(ca, 0, "{case:?}");
        assert_eq!(cb, 0, "{case:?}");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{case:?}");
        assert_eq!(ma["outputs"][0]["sha256"], mb["outputs"][0]["sha256"]);
        assert_eq!(ma["command"], case[0]);
    }
}

#[test]
fn config_file_reproduces_flags() {
    let dir = tempfile::tempdir().unwrap();
    let flags = ["tail", "--family", "tree", "--degree", "3", "--radius", "8", "--p", "0.6", "--trials", "400", "--seed", "1"];
    let (_, from_flags, manifest) = common::run_cli(BIN, &flags, dir.path(), "flags.csv");
    let mut config = manifest["config"].clone();
    config["out"] = serde_json::json!(dir.path().join("file.csv"));
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, config.to_string()).unwrap();
    let st = Command::new(BIN).arg("--config").arg(&cfg_path).status().unwrap();
    assert!(st.success());
    assert_eq!(std::fs::read(dir.path().join("file.csv")).unwrap(), from_flags);
}

#[test]
fn errors_are_json_on_stderr() {
    let out = Command::new(BIN).args(["walk", "--corpus", "k4", "--p", "1.5"]).output().unwrap();
    assert!(!out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["category"], "parameter");

    let out = Command::new(BIN).args(["exact-check", "enumerate", "--family", "hypercubic", "--dim", "2", "--side", "9"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["category"], "size");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command":"alpha","p":0.5,"zeta":0.1,"surprise":true}"#).unwrap();
    let out = Command::new(BIN).arg("--config").arg(&cfg).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["category"], "json");
}
