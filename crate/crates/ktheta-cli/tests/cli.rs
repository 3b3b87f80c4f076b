//! End-to-end command behavior: exit codes, file outputs, and the warning
//! path of the singular fixture.

use std::path::Path;
use std::process::Command;

fn ktheta() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ktheta"))
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

const BLASCHKE_CONFIG: &str = r#"{"inner":{"type":"blaschke","zeros":[{"re":0.5,"im":0.0}],"unimodular":{"re":1.0,"im":0.0}},"seed":7}"#;
const SINGULAR_CONFIG: &str =
    r#"{"inner":{"type":"singular","atoms":[{"angle":0.0,"mass":1.0}]},"seed":7}"#;

#[test]
fn verify_passes_on_blaschke_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let out = ktheta()
        .args(["verify", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS basis-orthonormality"));
    assert!(text.contains("0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_singular_warns_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, SINGULAR_CONFIG);
    let out = ktheta()
        .args(["verify", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("warning: singular factor present"));
    assert!(text.contains("WARN"));
    assert!(text.contains("0 failed"));
}

#[test]
fn verify_insufficient_truncation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(
        &config,
        r#"{"inner":{"type":"blaschke","zeros":[{"re":0.93,"im":0.0}],"unimodular":{"re":1.0,"im":0.0}},"truncation":{"N":8}}"#,
    );
    let out = ktheta()
        .args(["verify", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation insufficient"));
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(
        &config,
        r#"{"inner":{"type":"blaschke","zeros":[{"re":1.0,"im":0.0}],"unimodular":{"re":1.0,"im":0.0}}}"#,
    );
    let out = ktheta()
        .args(["verify", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decay_with_wrong_size_operator_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let opfile = dir.path().join("op.csv");
    write(
        &opfile,
        "2,2\n0,0,1.0,0.0\n0,1,0.0,0.0\n1,0,0.0,0.0\n1,1,1.0,0.0\n",
    );
    let out = ktheta()
        .args([
            "decay",
            "--config",
            config.to_str().unwrap(),
            "--operator",
            opfile.to_str().unwrap(),
            "--out",
            dir.path().join("curve.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn decay_identity_writes_curve_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let out_path = dir.path().join("curve.csv");
    let out = ktheta()
        .args([
            "decay",
            "--config",
            config.to_str().unwrap(),
            "--operator",
            "identity",
            "--nmax",
            "10",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,value");
    assert_eq!(lines.len(), 12); // header + n = 0..=10
    assert!(lines[1].starts_with("0,1.0000000000000000e0"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("curve.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["verdict"], "decayed");
    assert_eq!(sidecar["dim"], 1);
}

#[test]
fn fixed_point_reports_gap() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let report_path = dir.path().join("fp.json");
    let out = ktheta()
        .args([
            "fixed-point",
            "--config",
            config.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["unique_zero"], true);
    let sigma = report["sigma_min"].as_f64().unwrap();
    assert!((sigma - 0.75).abs() < 1e-10);
}

#[test]
fn h2_splits_perturbed_toeplitz() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = dir.path().join("sym.csv");
    write(&symbol, "m,re,im\n0,2.0,0.0\n1,1.0,0.0\n");
    let perturbation = dir.path().join("pert.csv");
    let mut pert = String::from("8,8\n");
    for i in 0..8 {
        for j in 0..8 {
            let v = if i == 0 && j == 0 { "1.0" } else { "0.0" };
            pert.push_str(&format!("{i},{j},{v},0.0\n"));
        }
    }
    write(&perturbation, &pert);
    let prefix = dir.path().join("split");
    let out = ktheta()
        .args([
            "h2",
            "--symbol",
            symbol.to_str().unwrap(),
            "--perturbation",
            perturbation.to_str().unwrap(),
            "--order",
            "8",
            "--nstar",
            "3",
            "--out",
            prefix.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("split_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["symbol"]["0"]["re"], 2.0);
    assert_eq!(report["symbol"]["1"]["re"], 1.0);
    assert!(report["residual_norm"].as_f64().unwrap() > 0.9);
    let k_csv = std::fs::read_to_string(dir.path().join("split_k.csv")).unwrap();
    // residual has the single corner entry
    assert!(k_csv
        .lines()
        .any(|l| l.starts_with("0,0,1.0000000000000000e0")));

    // n_star too large for the order
    let out = ktheta()
        .args([
            "h2",
            "--symbol",
            symbol.to_str().unwrap(),
            "--order",
            "8",
            "--nstar",
            "4",
            "--out",
            prefix.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn probe_writes_curves_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let prefix = dir.path().join("probe");
    let out = ktheta()
        .args([
            "probe",
            "--config",
            config.to_str().unwrap(),
            "--out",
            prefix.to_str().unwrap(),
            "--probes",
            "3",
            "--nmax",
            "8",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    for i in 0..3 {
        assert!(dir
            .path()
            .join(format!("probe_operator_{i:02}.csv"))
            .exists());
        assert!(dir.path().join(format!("probe_shift_{i:02}.csv")).exists());
    }
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("probe_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["bound_ok"], true);
}

#[test]
fn build_persists_a_loadable_basis() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    write(&config, BLASCHKE_CONFIG);
    let basis_path = dir.path().join("basis.txt");
    let out = ktheta()
        .args([
            "build",
            "--config",
            config.to_str().unwrap(),
            "--out",
            basis_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let loaded = ktheta::io::load_basis(&basis_path).unwrap();
    assert_eq!(loaded.order(), 64);
    assert_eq!(loaded.dim(), 1);
    // first header line is JSON with the spec embedded
    let text = std::fs::read_to_string(&basis_path).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["spec"]["type"], "blaschke");
    assert_eq!(header["d"], 1);
}
