use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fiberwave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiberwave"))
        .args(args)
        .env("FIBERWAVE_OUT", out)
        .output()
        .unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap()
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(code(&fiberwave(&["run", "cone", "--steps", "300"], dir.path())), 3);
    }
    for file in ["cone_timeseries.csv", "cone_report.json"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn timeseries_has_header_and_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fiberwave(&["run", "circle", "--steps", "50"], dir.path())), 0);
    let csv = std::fs::read_to_string(dir.path().join("circle_timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,theta,phi,phase_analytic,norm,helicity_expect,energy_expect,fidelity,schrodinger_residual,lvn_residual"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 51);
    assert!(rows[0].ends_with(",,"));
    assert!(!rows[25].contains(",,"));
}

#[test]
fn report_records_checks() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fiberwave(&["run", "straight"], dir.path())), 0);
    let text = std::fs::read_to_string(dir.path().join("straight_report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["j"], 0.5);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "norm_drift"));
}

#[test]
fn out_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag: PathBuf = flag_dir.path().join("nested");
    let out = fiberwave(&["run", "straight", "--out", flag.to_str().unwrap()], env_dir.path());
    assert_eq!(code(&out), 0);
    assert!(flag.join("straight_timeseries.csv").exists());
    assert!(!env_dir.path().join("straight_timeseries.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = fiberwave(&["run", &data("negative_j.toml")], dir.path());
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("j"));
    assert!(!dir.path().join("negative_j_report.json").exists());

    let tight = fiberwave(&["run", &data("tight_tolerance.toml")], dir.path());
    assert_eq!(code(&tight), 3);
    assert!(dir.path().join("tight_tolerance_report.json").exists());

    let pole = fiberwave(&["run", &data("pole_passage.toml")], dir.path());
    assert_eq!(code(&pole), 4);

    let missing = fiberwave(&["run", "no_such_scenario"], dir.path());
    assert_eq!(code(&missing), 1);
}

#[test]
fn oracle_flag_adds_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = fiberwave(&["run", "circle", "--oracle", "--steps", "2000"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("oracle_agreement"));
}

#[test]
fn list_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let list = fiberwave(&["list"], dir.path());
    assert_eq!(code(&list), 0);
    let text = String::from_utf8_lossy(&list.stdout);
    for name in ["straight", "circle", "cone", "cone_loop", "luo_spiral"] {
        assert!(text.contains(name));
    }
    assert_eq!(code(&fiberwave(&["validate", "luo_spiral"], dir.path())), 0);
    assert_eq!(code(&fiberwave(&["validate", &data("negative_j.toml")], dir.path())), 2);
}
