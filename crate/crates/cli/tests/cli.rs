use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superradiance"))
}

#[test]
fn dicke_preset_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["dicke", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let features = fs::read_to_string(dir.path().join("fig1_partial_dicke_features.csv")).unwrap();
    assert_eq!(features.lines().count(), 6);
    assert!(dir.path().join("fig1_partial_dicke_n75.csv").exists());
}

#[test]
fn lindblad_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"scenario": "custom", "n_atoms": 2, "t_max": 0.5, "initial_state": {"dicke": {"n": 2}}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["lindblad", "--stride", "5", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let traj = fs::read_to_string(out_dir.join("custom_trajectory.csv")).unwrap();
    // 0.5 / 0.005 = 100 steps, recorded every fifth
    assert_eq!(traj.lines().count(), 1 + 21);
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(
        &config,
        r#"{"scenario": "custom", "n_atoms": 2, "t_max": 0.5, "initial_state": "singlet", "extra": 1}"#,
    )
    .unwrap();
    let out = bin()
        .args(["lindblad", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
}

#[test]
fn scenario_must_match_command() {
    let out = bin()
        .args(["sweep", "--scenario", "fig2_purity"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot be run by the sweep command"));
}

#[test]
fn preset_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["preset", "oscillator_null"]).output().unwrap();
    assert!(out.status.success());
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("\"t_max\": 3.0"));
    let config = dir.path().join("osc.json");
    fs::write(&config, json.replace("\"t_max\": 3.0", "\"t_max\": 0.5")).unwrap();
    let out = bin()
        .args(["oscillator", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("oscillator_null_fock.csv").exists());
}

#[test]
fn validate_passes() {
    let out = bin().arg("validate").output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 8);
}
