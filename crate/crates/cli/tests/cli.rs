use std::{fs, path::Path, process::Command};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_cavispin");

fn cavispin(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).env("CAVISPIN_OUTPUT_DIR", dir).output().expect("binary runs")
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &str = r#"
name = "small"
models = ["eliminated", "xy-chain"]
n_sites = 2
channels = ["p_c2", "m_total"]

[params]
g1 = 1.0
g2 = 1.0
g3 = 0.5
g4 = 1.0
om1 = 10.0
om2 = 10.0
om3 = 10.0
om4 = 5.0
d1 = 40.0
d2 = 80.0
d3 = 20.0
d4 = 40.0
j_hop = 0.5

[initial]
kind = "product"
levels = ["b", "c"]

[grid]
t_start = 0.0
t_end = 20.0
n_samples = 21
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn coeffs_prints_reported_values() {
    let dir = TempDir::new().unwrap();
    let out = cavispin(dir.path(), &["builtin", "coeffs"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["A = -0.0128", "B = 0.0210", "C = 0.0113", "overall: pass"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn run_writes_csv_and_sidecar_into_output_dir() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "small.toml", SMALL);
    let out = cavispin(dir.path(), &["run", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("small.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,p_c2_full,m_total_full,p_c2_eff,m_total_eff");
    assert_eq!(csv.lines().count(), 22);
    let json = fs::read_to_string(dir.path().join("small.csv.json")).unwrap();
    assert!(json.contains("\"validation\"") && json.contains("\"routes\""));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "small.toml", SMALL);
    assert!(cavispin(dir.path(), &["run", &config, "-o", "one.csv"]).status.success());
    assert!(cavispin(dir.path(), &["run", &config, "-o", "two.csv"]).status.success());
    let one = fs::read(dir.path().join("one.csv")).unwrap();
    assert_eq!(one, fs::read(dir.path().join("two.csv")).unwrap());

    let one = dir.path().join("one.csv");
    let two = dir.path().join("two.csv");
    let out = cavispin(dir.path(), &["compare", one.to_str().unwrap(), two.to_str().unwrap(), "p_c2_full"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("max_abs = 0.0"), "{}", stdout(&out));
}

#[test]
fn failing_validation_exits_nonzero_unless_allowed() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "bad.toml", &SMALL.replace("g3 = 0.5", "g3 = 1.0"));

    let out = cavispin(dir.path(), &["validate", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("stark_match_ab"));

    let out = cavispin(dir.path(), &["run", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("small.csv").exists());

    let out = cavispin(dir.path(), &["run", &config, "--allow-invalid"]);
    assert!(out.status.success());
    assert!(dir.path().join("small.csv").exists());
}

#[test]
fn compare_rejects_mismatched_grids_and_flags_tolerance() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "small.toml", SMALL);
    let longer = write_config(dir.path(), "longer.toml", &SMALL.replace("n_samples = 21", "n_samples = 41"));
    assert!(cavispin(dir.path(), &["run", &config, "-o", "a.csv"]).status.success());
    assert!(cavispin(dir.path(), &["run", &longer, "-o", "b.csv"]).status.success());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let out = cavispin(dir.path(), &["compare", a, b, "p_c2_full"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid mismatch"));

    let out = cavispin(dir.path(), &["compare", a, a, "p_c2_full", "--channel-b", "p_c2_eff", "--tolerance", "1e-6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zz_conserve_and_trotter_sweep_builtins() {
    let dir = TempDir::new().unwrap();
    let out = cavispin(dir.path(), &["builtin", "zz-conserve"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("zz-conserve.csv")).unwrap();
    assert!(csv.starts_with("t,p_a1,p_b1,p_c1,p_a2,p_b2,p_c2\n"));

    let out = cavispin(dir.path(), &["builtin", "trotter-sweep"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("log-log slope"));
    let csv = fs::read_to_string(dir.path().join("trotter-sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn unknown_builtin_and_missing_config_are_errors() {
    let dir = TempDir::new().unwrap();
    assert!(!cavispin(dir.path(), &["builtin", "fig3"]).status.success());
    let out = cavispin(dir.path(), &["run", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(1));
}
