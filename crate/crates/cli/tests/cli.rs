//! End-to-end runs of the binary: exit codes for each failure class,
//! tolerance override precedence, CSV emission, and byte-for-byte
//! determinism of repeated runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trikurv")
}

fn run<I, S>(args: I, env_tol: Option<&str>) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let mut cmd = Command::new(bin());
    cmd.args(args);
    cmd.env_remove("TRIKURV_TOL");
    if let Some(tol) = env_tol {
        cmd.env("TRIKURV_TOL", tol);
    }
    cmd.output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

const PASSING_PROFILE: &str = r#"{
    "k1": "sqrt(5)/s",
    "k2": 0,
    "f": "9/(2*s)",
    "r": "-189/(2*s^2)",
    "eta": {"explicit": [0.0, -1.0, 0.0]},
    "case": "subcase-iv1",
    "grid": {"lo": 0.5, "hi": 5.0, "n": 25}
}"#;

fn write_profile(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn passing_profile_exits_zero_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_profile(dir.path(), "profile.json", PASSING_PROFILE);
    let csv_path = dir.path().join("rows.csv");
    let output = run(
        [
            "residual",
            "--config",
            &config,
            "--csv",
            csv_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("\"passed\": true"));
    let csv = fs::read_to_string(csv_path).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "s,E1,E1.scale,E2,E2.scale,E3,E3.scale,subcase-iv1.eq1,subcase-iv1.eq1.scale,\
         subcase-iv1.eq2,subcase-iv1.eq2.scale,status"
    );
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn impossible_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_profile(dir.path(), "profile.json", PASSING_PROFILE);
    let output = run(["residual", "--config", &config, "--tol", "1e-30"], None);
    assert_eq!(code(&output), 1);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("\"passed\": false"));
}

#[test]
fn environment_tolerance_applies_and_flag_overrides_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_profile(dir.path(), "profile.json", PASSING_PROFILE);
    let strict = run(["residual", "--config", &config], Some("1e-30"));
    assert_eq!(code(&strict), 1);
    let overridden = run(
        ["residual", "--config", &config, "--tol", "1e-8"],
        Some("1e-30"),
    );
    assert_eq!(code(&overridden), 0);
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_field = PASSING_PROFILE.replace("\"case\"", "\"reduction\"");
    let config = write_profile(dir.path(), "profile.json", &unknown_field);
    let output = run(["residual", "--config", &config], None);
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));

    let bad_expr = PASSING_PROFILE.replace("sqrt(5)/s", "sqrt(5)/");
    let config = write_profile(dir.path(), "bad_expr.json", &bad_expr);
    let output = run(["residual", "--config", &config], None);
    assert_eq!(code(&output), 2);

    let missing = dir.path().join("nowhere.json");
    let output = run(
        ["residual", "--config", missing.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&output), 2);
}

#[test]
fn unknown_verify_target_exits_two() {
    let output = run(["verify", "case-ix"], None);
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("case-ix"));
}

#[test]
fn grid_stuck_at_a_pole_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let profile = r#"{
        "k1": 1,
        "k2": 0,
        "f": "tan(s)",
        "r": 1,
        "eta": {"explicit": [1.0, 0.0, 0.0]},
        "grid": {"lo": 1.5707963267948966, "hi": 1.5707963267948966, "n": 1}
    }"#;
    let config = write_profile(dir.path(), "pole.json", profile);
    let output = run(["residual", "--config", &config], None);
    assert_eq!(code(&output), 3);
    assert!(String::from_utf8_lossy(&output.stderr).contains("skipped"));
}

#[test]
fn verify_target_passes_and_repeated_runs_are_byte_identical() {
    let first = run(["verify", "subcase-ii1"], None);
    assert_eq!(code(&first), 0);
    let second = run(["verify", "subcase-ii1"], None);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn residual_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_profile(dir.path(), "profile.json", PASSING_PROFILE);
    let first = run(["residual", "--config", &config], None);
    let second = run(["residual", "--config", &config], None);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn helix_search_finds_the_circular_root() {
    let dir = tempfile::tempdir().unwrap();
    let profile = r#"{
        "k1": 1,
        "k2": 1,
        "f": "tan(0 - s)",
        "r": 6,
        "eta": {"explicit": [1.0, 0.0, 0.0]},
        "grid": {"lo": 0.5, "hi": 1.2, "n": 20}
    }"#;
    let config = write_profile(dir.path(), "helix.json", profile);
    let output = run(
        [
            "solve-helix",
            "--config",
            &config,
            "--bounds",
            "0.3,1.2,0.3,1.2",
            "--starts",
            "25",
        ],
        None,
    );
    assert_eq!(code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("0.8660254037844385"));

    let bad_bounds = run(
        ["solve-helix", "--config", &config, "--bounds", "0.3,1.2"],
        None,
    );
    assert_eq!(code(&bad_bounds), 2);
}

#[test]
fn parse_check_round_trips_and_rejects_garbage() {
    let output = run(["parse-check", "sqrt(5)/s"], None);
    assert_eq!(code(&output), 0);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("\"round_trip\": true"));
    assert!(stdout.contains("Quotient(Sqrt(Const 5), Var s)"));

    let bad = run(["parse-check", "sqrt(5)/"], None);
    assert_eq!(code(&bad), 2);
}
