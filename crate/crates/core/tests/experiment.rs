use std::f64::consts::PI;
use std::fs;

use superradiance::experiment::{
    build_initial_state, phase_spread, run_lindblad, run_scenario, run_sweep, trajectory_csv,
    InitialState, PhaseLayout, Scenario, ScenarioConfig, SweepParameter, SweepSpec,
};
use superradiance::Error;

fn small_sweep(n_atoms: usize, values: Vec<f64>) -> ScenarioConfig {
    ScenarioConfig {
        n_atoms,
        t_max: 2.5,
        sweep: Some(SweepSpec {
            parameter: SweepParameter::DipoleMagnitude,
            values,
            phase_spread: 0.0,
        }),
        ..ScenarioConfig::preset(Scenario::Fig6DipoleSweep)
    }
}

#[test]
fn scenario_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ScenarioConfig {
        n_atoms: 4,
        t_max: 1.0,
        ..ScenarioConfig::preset(Scenario::Fig3NondickeBurst)
    };
    config.output_dir = dir.path().join("a");
    let first = run_scenario(&config, 1).unwrap();
    config.output_dir = dir.path().join("b");
    let second = run_scenario(&config, 1).unwrap();
    assert_eq!(first.files.len(), 3);
    for (a, b) in first.files.iter().zip(&second.files) {
        if a.extension().is_some_and(|e| e == "csv") {
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{a:?}");
        }
    }
}

#[test]
fn trajectory_and_feature_headers() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        n_atoms: 3,
        t_max: 0.5,
        output_dir: dir.path().to_path_buf(),
        ..ScenarioConfig::preset(Scenario::Fig5Dispersions)
    };
    run_scenario(&config, 1).unwrap();
    let traj = fs::read_to_string(dir.path().join("fig5_dispersions_trajectory.csv")).unwrap();
    assert_eq!(
        traj.lines().next().unwrap(),
        "t,inversion,intensity_fd,intensity_op,purity,re_J_minus,im_J_minus,\
         pair_dispersion_mean,classical_dispersion,alpha_0,alpha_1,alpha_2,phi_0,phi_1,phi_2"
    );
    let first_row: Vec<&str> = traj.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first_row.len(), 15);
    assert_eq!(first_row[0], "0");
    let features = fs::read_to_string(dir.path().join("fig5_dispersions_features.csv")).unwrap();
    let mut lines = features.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,n_atoms,d,t_delay,peak_intensity,fwhm,t_min_pair_dispersion,t_min_classical_dispersion"
    );
    assert!(lines
        .next()
        .unwrap()
        .starts_with("fig5_dispersions,3,0.435889894354,"));
    let meta = fs::read_to_string(dir.path().join("fig5_dispersions_config.json")).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&meta).unwrap();
    assert_eq!(meta["atoms"].as_array().unwrap().len(), 3);
    assert!((meta["atoms"][0]["k"].as_f64().unwrap() - 0.95).abs() < 1e-12);
}

#[test]
fn dicke_state_has_empty_phase_fields() {
    let config = ScenarioConfig {
        n_atoms: 3,
        t_max: 0.2,
        ..ScenarioConfig::preset(Scenario::Fig2Purity)
    };
    let run = run_lindblad(&config, &InitialState::Dicke { n: 3 }).unwrap();
    let csv = trajectory_csv(&run.trajectory);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    // Δ and every φ_i are undefined for a state without dipoles
    assert_eq!(row[8], "");
    assert!(row[12..15].iter().all(|f| f.is_empty()));
    assert!(row[9..12].iter().all(|f| *f == "0"));
}

#[test]
fn fig1_writes_five_analytic_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        output_dir: dir.path().to_path_buf(),
        ..ScenarioConfig::preset(Scenario::Fig1PartialDicke)
    };
    let out = run_scenario(&config, 1).unwrap();
    assert_eq!(out.features.len(), 5);
    for n in [100, 75, 50, 25, 1] {
        let path = dir.path().join(format!("fig1_partial_dicke_n{n}.csv"));
        let text = fs::read_to_string(path).unwrap();
        assert!(text.starts_with("t,inversion,intensity_fd,intensity_op,purity,"));
    }
    let delays: Vec<f64> = out.features.iter().map(|f| f.t_delay).collect();
    assert!(delays[0] > delays[1] && delays[1] > 0.0);
    assert!(delays[2..].iter().all(|&t| t == 0.0));
}

#[test]
fn sweep_rows_follow_values() {
    let values: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let result = run_sweep(&small_sweep(4, values.clone()), 2).unwrap();
    assert_eq!(result.rows.len(), 9);
    for (row, d) in result.rows.iter().zip(&values) {
        assert_eq!(row.dipole_magnitude, *d);
    }
    assert!(result.rows[8].t_delay < result.rows[0].t_delay);
    for w in result.rows.windows(2) {
        assert!(w[1].t_delay <= w[0].t_delay, "{w:?}");
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let config = small_sweep(3, vec![0.2, 0.5, 0.8]);
    assert_eq!(
        run_sweep(&config, 1).unwrap(),
        run_sweep(&config, 3).unwrap()
    );
}

#[test]
fn sweep_failure_names_the_value() {
    let mut config = small_sweep(3, vec![0.3, 0.6]);
    config.dt = Some(0.5);
    match run_sweep(&config, 1) {
        Err(Error::SweepRun { value, .. }) => assert_eq!(value, 0.3),
        other => panic!("expected a sweep failure, got {other:?}"),
    }
}

#[test]
fn zero_dipole_is_the_excited_dicke_state() {
    let config = ScenarioConfig {
        n_atoms: 4,
        t_max: 1.0,
        ..ScenarioConfig::preset(Scenario::Custom)
    };
    let zero = InitialState::FromDipole {
        d: 0.0,
        phase_spread: 0.0,
        layout: PhaseLayout::Grid,
    };
    assert_eq!(
        build_initial_state(&zero, 4).unwrap().rho(),
        build_initial_state(&InitialState::Dicke { n: 4 }, 4)
            .unwrap()
            .rho()
    );
    let a = run_lindblad(&config, &zero).unwrap();
    let b = run_lindblad(&config, &InitialState::Dicke { n: 4 }).unwrap();
    assert_eq!(trajectory_csv(&a.trajectory), trajectory_csv(&b.trajectory));
}

#[test]
fn phases_converge_after_the_burst() {
    let config = ScenarioConfig {
        n_atoms: 6,
        t_max: 3.0,
        ..ScenarioConfig::preset(Scenario::Fig4PhaseTrajectories)
    };
    let state = config.initial_state.clone().unwrap();
    let run = run_lindblad(&config, &state).unwrap();
    let t_conv = run.features.t_phase_convergence.unwrap();
    let records = &run.trajectory.records;
    let at = records.iter().find(|r| r.t == t_conv).unwrap();
    let initial = phase_spread(&records[0]).unwrap();
    assert!((initial - 2.0 * PI / 5.0).abs() < 1e-12);
    assert!(phase_spread(at).unwrap() < initial);
}

#[test]
fn random_layout_is_reproducible() {
    let state = InitialState::FromDipole {
        d: 0.5,
        phase_spread: 0.4,
        layout: PhaseLayout::Random { seed: 11 },
    };
    let a = build_initial_state(&state, 3).unwrap();
    let b = build_initial_state(&state, 3).unwrap();
    assert_eq!(a.rho(), b.rho());
}

#[test]
fn oscillator_scenario_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        t_max: 1.0,
        output_dir: dir.path().to_path_buf(),
        ..ScenarioConfig::preset(Scenario::OscillatorNull)
    };
    let out = run_scenario(&config, 1).unwrap();
    assert_eq!(out.features.len(), 1);
    assert_eq!(out.features[0].t_delay, 0.0);
    let fock = fs::read_to_string(dir.path().join("oscillator_null_fock.csv")).unwrap();
    assert_eq!(
        fock.lines().next().unwrap(),
        "t,re_a_0,im_a_0,re_a_1,im_a_1,deviation"
    );
    let worst = fock
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn missing_output_directory_parent_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let config = ScenarioConfig {
        n_atoms: 2,
        t_max: 0.1,
        output_dir: blocker.join("sub"),
        ..ScenarioConfig::preset(Scenario::Custom)
    };
    match run_scenario(&config, 1) {
        Err(Error::Io { path, .. }) => assert_eq!(path, blocker.join("sub")),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}
