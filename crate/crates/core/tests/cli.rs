use std::process::{Command, Output};

fn worldline(args: &[&str], config: &str) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_worldline"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .current_dir(dir.path())
        .output()
        .unwrap();
    (out, dir)
}

#[test]
fn spectrum_prints_csv_and_summary() {
    let (out, _dir) = worldline(&["spectrum"], r#"{"hamiltonian": {"kind": "landau_cartesian", "b_field": 2.0}}"#);
    assert_eq!(out.status.code(), Some(0));
    let body = String::from_utf8(out.stdout).unwrap();
    assert!(body.starts_with("index,eigenvalue\n"));
    assert_eq!(body.lines().count(), 257);
    assert!(String::from_utf8(out.stderr).unwrap().contains("lambda_min=1.000000000"));
}

#[test]
fn literal_monopole_vqe_is_a_config_error() {
    let (out, _dir) =
        worldline(&["vqe"], r#"{"hamiltonian": {"kind": "monopole_su2", "b_field": 2.0, "variant": "literal"}}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("hermitian_part"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let (out, _dir) = worldline(&["spectrum"], r#"{"hamiltonian": {"kind": "landau_cartesian"}, "optimiser": {}}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn variant_flag_overrides_config() {
    let (out, _dir) = worldline(
        &["vqe", "--variant", "hermitian_part", "--quiet"],
        r#"{"hamiltonian": {"kind": "monopole_su2", "b_field": 2.0, "variant": "literal"}, "ansatz": {"depth": 1},
            "optimizer": {"max_iter": 20}}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
}

#[test]
fn out_file_gets_body_and_stdout_gets_summary() {
    let (out, dir) = worldline(&["wuyang", "--out", "wy.csv"], "{}");
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(dir.path().join("wy.csv")).unwrap();
    assert!(body.starts_with("r,g,gprime,series_g,series_diff\n"));
    assert!(String::from_utf8(out.stdout).unwrap().contains("halving_ratio="));
}
