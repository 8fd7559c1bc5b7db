//! Scenario definitions, parameter sweeps and CSV persistence.

mod config;
pub mod csv;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    dipole_for_excitation, pure_state_from_dipole, InitialState, OscillatorSpec, PhaseLayout,
    Scenario, ScenarioConfig, SweepParameter, SweepSpec,
};

use crate::dicke::{self, AnalyticTrajectory, DickeParams};
use crate::error::{Error, Result};
use crate::lindblad::{
    evolve, extract_burst_features, peak_shape, BurstFeatures, ObservableRecord, Trajectory,
};
use crate::operators::AtomRegister;
use crate::oscillator::{lindblad_fock_check, FockCheck, OscillatorEnsemble};
use crate::state::{dicke_state, product_mixed_state, singlet_state, AtomSpec, QuantumState};
use crate::C64;
use csv::{format_float, format_opt, CsvTable};

/// Initial excitation fractions of the partial-Dicke family.
pub const PARTIAL_DICKE_FRACTIONS: [f64; 5] = [1.0, 0.75, 0.5, 0.25, 0.01];

/// Step of the Dicke equation when the config leaves `dt` unset.
const DICKE_STEP_PARAMETER: f64 = 4e-3;

pub const FEATURES_HEADER: [&str; 8] = [
    "scenario",
    "n_atoms",
    "d",
    "t_delay",
    "peak_intensity",
    "fwhm",
    "t_min_pair_dispersion",
    "t_min_classical_dispersion",
];

const TRAJECTORY_PREFIX: [&str; 9] = [
    "t",
    "inversion",
    "intensity_fd",
    "intensity_op",
    "purity",
    "re_J_minus",
    "im_J_minus",
    "pair_dispersion_mean",
    "classical_dispersion",
];

/// One line of a features CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub scenario: Scenario,
    pub n_atoms: usize,
    pub d: Option<f64>,
    pub t_delay: f64,
    pub peak_intensity: f64,
    pub fwhm: f64,
    pub t_min_pair_dispersion: Option<f64>,
    pub t_min_classical_dispersion: Option<f64>,
}

impl FeatureRow {
    fn from_burst(scenario: Scenario, n_atoms: usize, d: Option<f64>, f: &BurstFeatures) -> Self {
        Self {
            scenario,
            n_atoms,
            d,
            t_delay: f.t_delay,
            peak_intensity: f.peak_intensity,
            fwhm: f.fwhm,
            t_min_pair_dispersion: Some(f.t_min_pair_dispersion),
            t_min_classical_dispersion: f.t_min_classical_dispersion,
        }
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.scenario.name().to_string(),
            self.n_atoms.to_string(),
            format_opt(self.d),
            format_float(self.t_delay),
            format_float(self.peak_intensity),
            format_float(self.fwhm),
            format_opt(self.t_min_pair_dispersion),
            format_opt(self.t_min_classical_dispersion),
        ]
    }
}

pub fn features_csv(rows: &[FeatureRow]) -> String {
    let mut table = CsvTable::new(&FEATURES_HEADER);
    for row in rows {
        table.push(&row.fields());
    }
    table.as_str().to_string()
}

/// Header of a master-equation trajectory CSV for `n_atoms` atoms.
pub fn trajectory_header(n_atoms: usize) -> Vec<String> {
    let mut header: Vec<String> = TRAJECTORY_PREFIX.iter().map(|s| s.to_string()).collect();
    header.extend((0..n_atoms).map(|i| format!("alpha_{i}")));
    header.extend((0..n_atoms).map(|i| format!("phi_{i}")));
    header
}

fn record_fields(r: &ObservableRecord) -> Vec<String> {
    let mut row = vec![
        format_float(r.t),
        format_float(r.inversion),
        format_float(r.intensity_fd),
        format_float(r.intensity_op),
        format_float(r.purity),
        format_float(r.collective_dipole.re),
        format_float(r.collective_dipole.im),
        format_float(r.pair_dispersion_mean),
        format_opt(r.classical_dispersion),
    ];
    let phases = r.phases();
    row.extend(phases.iter().map(|p| format_float(p.alpha)));
    row.extend(phases.iter().map(|p| format_opt(p.valid_phase())));
    row
}

/// Renders a master-equation trajectory in the trajectory CSV layout.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut table = CsvTable::new(&trajectory_header(traj.n_atoms));
    for r in &traj.records {
        table.push(&record_fields(r));
    }
    table.as_str().to_string()
}

/// Renders a Dicke-equation trajectory: the trajectory prefix columns only,
/// with `intensity_op` holding the model right-hand side `-dJ/dt` and
/// state-resolved columns left empty.
pub fn analytic_csv(traj: &AnalyticTrajectory, dt: f64) -> String {
    let fd = crate::lindblad::finite_difference_intensity(&traj.inversion, dt);
    let mut table = CsvTable::new(&TRAJECTORY_PREFIX);
    let samples = traj
        .times
        .iter()
        .zip(&traj.inversion)
        .zip(&fd)
        .zip(&traj.intensity);
    for (((&t, &j), &fd), &intensity) in samples {
        let mut row = vec![
            format_float(t),
            format_float(j),
            format_float(fd),
            format_float(intensity),
        ];
        row.resize(TRAJECTORY_PREFIX.len(), String::new());
        table.push(&row);
    }
    table.as_str().to_string()
}

/// Spread `max φ_i - min φ_i` of the defined per-atom phases of a record.
pub fn phase_spread(record: &ObservableRecord) -> Option<f64> {
    let phases: Vec<f64> = record
        .phases()
        .iter()
        .filter_map(|p| p.valid_phase())
        .collect();
    if phases.len() < 2 {
        return None;
    }
    let max = phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = phases.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max - min)
}

/// Per-atom states described by an initial-state spec, when it is a product.
pub fn resolve_atoms(state: &InitialState, n_atoms: usize) -> Result<Option<Vec<AtomSpec>>> {
    match state {
        InitialState::Product(atoms) => Ok(Some(atoms.clone())),
        InitialState::FromDipole {
            d,
            phase_spread,
            layout,
        } => config::atoms_from_dipole(n_atoms, *d, *phase_spread, *layout).map(Some),
        InitialState::Dicke { .. } | InitialState::Singlet => Ok(None),
    }
}

pub fn build_initial_state(state: &InitialState, n_atoms: usize) -> Result<QuantumState> {
    state.validate(n_atoms)?;
    match state {
        InitialState::Dicke { n } => dicke_state(&AtomRegister::new(n_atoms)?, *n),
        InitialState::Singlet => Ok(singlet_state()),
        _ => {
            let atoms = resolve_atoms(state, n_atoms)?.expect("product-type state");
            product_mixed_state(&atoms)
        }
    }
}

/// A master-equation run with its extracted burst features.
#[derive(Clone, Debug)]
pub struct LindbladRun {
    pub trajectory: Trajectory,
    pub features: BurstFeatures,
}

/// Evolves `state` under the config's step settings and extracts features.
pub fn run_lindblad(config: &ScenarioConfig, state: &InitialState) -> Result<LindbladRun> {
    let initial = build_initial_state(state, config.n_atoms)?;
    let trajectory = evolve(&initial, &config.evolution_config())?;
    let features = extract_burst_features(&trajectory)?;
    Ok(LindbladRun {
        trajectory,
        features,
    })
}

/// Dicke-equation trajectory started from `n_excited` of `config.n_atoms`
/// excited atoms.
pub fn run_partial_dicke(config: &ScenarioConfig, n_excited: usize) -> Result<AnalyticTrajectory> {
    let params = DickeParams::new(config.n_atoms, config.gamma0)?;
    let j0 = 2.0 * n_excited as f64 - config.n_atoms as f64;
    dicke::integrate_dicke_ode(&params, j0, config.t_max, dicke_dt(config))
}

fn dicke_dt(config: &ScenarioConfig) -> f64 {
    config
        .dt
        .unwrap_or(DICKE_STEP_PARAMETER / (config.gamma0 * (config.n_atoms as f64 + 1.0)))
}

/// Excited-atom count for an initial fraction, rounded to the nearest atom.
pub fn excited_count(n_atoms: usize, fraction: f64) -> usize {
    ((fraction * n_atoms as f64).round() as usize).min(n_atoms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub dipole_magnitude: f64,
    pub t_delay: f64,
    pub peak_intensity: f64,
    pub fwhm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    /// One row per sweep value, in sweep order.
    pub rows: Vec<SweepRow>,
}

/// Runs every sweep point on a pool of `workers` threads (0 picks the
/// available parallelism) and aggregates burst features.
pub fn run_sweep(config: &ScenarioConfig, workers: usize) -> Result<SweepResult> {
    let runs = sweep_runs(config, workers, None)?;
    Ok(SweepResult {
        rows: runs.into_iter().map(|(_, row)| row).collect(),
    })
}

fn sweep_runs(
    config: &ScenarioConfig,
    workers: usize,
    out_dir: Option<&Path>,
) -> Result<Vec<(FeatureRow, SweepRow)>> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("configuration has no sweep".into()))?;
    let layout = match &config.initial_state {
        Some(InitialState::FromDipole { layout, .. }) => *layout,
        _ => PhaseLayout::Grid,
    };
    let run_one = |d: f64| -> Result<(FeatureRow, SweepRow)> {
        let state = InitialState::FromDipole {
            d,
            phase_spread: sweep.phase_spread,
            layout,
        };
        let run = run_lindblad(config, &state)?;
        if let Some(dir) = out_dir {
            let name = format!("{}_d{}.csv", config.scenario.name(), format_float(d));
            csv::write_file(&dir.join(name), trajectory_csv(&run.trajectory).as_bytes())?;
        }
        let f = &run.features;
        Ok((
            FeatureRow::from_burst(config.scenario, config.n_atoms, Some(d), f),
            SweepRow {
                dipole_magnitude: d,
                t_delay: f.t_delay,
                peak_intensity: f.peak_intensity,
                fwhm: f.fwhm,
            },
        ))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<_>> =
        pool.install(|| sweep.values.par_iter().map(|&d| run_one(d)).collect());
    sweep
        .values
        .iter()
        .zip(results)
        .map(|(&value, r)| {
            r.map_err(|source| Error::SweepRun {
                value,
                source: Box::new(source),
            })
        })
        .collect()
}

/// Files written by one scenario run.
#[derive(Clone, Debug, Default)]
pub struct ScenarioOutput {
    pub files: Vec<PathBuf>,
    pub features: Vec<FeatureRow>,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    config: &'a ScenarioConfig,
    /// Resolved per-atom initial states, when the initial state is a product.
    atoms: Option<Vec<AtomSpec>>,
}

/// Runs a scenario and writes its CSVs (plus a JSON echo of the resolved
/// configuration) into `config.output_dir`.
pub fn run_scenario(config: &ScenarioConfig, workers: usize) -> Result<ScenarioOutput> {
    config.validate()?;
    let dir = config.output_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let name = config.scenario.name();
    let mut out = ScenarioOutput::default();

    let atoms = match &config.initial_state {
        Some(state) if config.sweep.is_none() => resolve_atoms(state, config.n_atoms)?,
        _ => None,
    };
    let meta = RunMetadata { config, atoms };
    let meta_path = dir.join(format!("{name}_config.json"));
    let json = serde_json::to_string_pretty(&meta)? + "\n";
    csv::write_file(&meta_path, json.as_bytes())?;
    out.files.push(meta_path);

    if config.sweep.is_some() {
        let runs = sweep_runs(config, workers, Some(dir))?;
        for (row, sweep_row) in runs {
            let d = sweep_row.dipole_magnitude;
            out.files
                .push(dir.join(format!("{name}_d{}.csv", format_float(d))));
            out.features.push(row);
        }
    } else {
        match config.scenario {
            Scenario::Fig1PartialDicke => run_fig1(config, dir, &mut out)?,
            Scenario::OscillatorNull => run_oscillator(config, dir, &mut out)?,
            _ => {
                let state = config.initial_state.as_ref().expect("validated");
                let run = run_lindblad(config, state)?;
                let path = dir.join(format!("{name}_trajectory.csv"));
                csv::write_file(&path, trajectory_csv(&run.trajectory).as_bytes())?;
                out.files.push(path);
                out.features.push(FeatureRow::from_burst(
                    config.scenario,
                    config.n_atoms,
                    state.dipole(),
                    &run.features,
                ));
            }
        }
    }

    let path = dir.join(format!("{name}_features.csv"));
    csv::write_file(&path, features_csv(&out.features).as_bytes())?;
    out.files.push(path);
    Ok(out)
}

fn run_fig1(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutput) -> Result<()> {
    let fractions: Vec<f64> = match &config.initial_state {
        Some(InitialState::Dicke { n }) => vec![*n as f64 / config.n_atoms as f64],
        _ => PARTIAL_DICKE_FRACTIONS.to_vec(),
    };
    for fraction in fractions {
        let n = excited_count(config.n_atoms, fraction);
        let traj = run_partial_dicke(config, n)?;
        let path = dir.join(format!("{}_n{n}.csv", config.scenario.name()));
        csv::write_file(&path, analytic_csv(&traj, dicke_dt(config)).as_bytes())?;
        out.files.push(path);
        if let Ok(shape) = peak_shape(&traj.times, &traj.intensity) {
            out.features.push(FeatureRow {
                scenario: config.scenario,
                n_atoms: config.n_atoms,
                d: None,
                t_delay: shape.t_peak,
                peak_intensity: shape.peak,
                fwhm: shape.fwhm,
                t_min_pair_dispersion: None,
                t_min_classical_dispersion: None,
            });
        }
    }
    Ok(())
}

fn run_oscillator(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutput) -> Result<()> {
    let spec = config.oscillator.as_ref().expect("validated");
    let to_c = |v: &[[f64; 2]]| {
        v.iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect::<Vec<_>>()
    };
    let ensemble = OscillatorEnsemble::new(to_c(&spec.amplitudes), config.gamma0)?;
    let dt = config.dt.unwrap_or(1e-3 / ensemble.len() as f64);
    let steps = (config.t_max / dt).round() as usize;
    let every = config.record_stride;

    let mut header = vec![
        "t".to_string(),
        "re_S".into(),
        "im_S".into(),
        "abs_S_sq".into(),
    ];
    for i in 0..ensemble.len() {
        header.push(format!("re_a_{i}"));
        header.push(format!("im_a_{i}"));
    }
    let mut table = CsvTable::new(&header);
    let mut times = Vec::new();
    let mut intensity = Vec::new();
    for step in (0..=steps).step_by(every) {
        let t = step as f64 * dt;
        let amps = ensemble.evolve_amplitudes(t)?;
        let s: C64 = amps.iter().sum();
        let mut row = vec![
            format_float(t),
            format_float(s.re),
            format_float(s.im),
            format_float(s.norm_sqr()),
        ];
        for a in &amps {
            row.push(format_float(a.re));
            row.push(format_float(a.im));
        }
        table.push(&row);
        times.push(t);
        intensity.push(config.gamma0 * s.norm_sqr());
    }
    let path = dir.join(format!("{}_trajectory.csv", config.scenario.name()));
    table.write(&path)?;
    out.files.push(path);

    let check = FockCheck {
        cutoff: spec.fock_cutoff,
        amplitudes: to_c(&spec.fock_amplitudes),
        gamma0: config.gamma0,
        t_max: config.t_max,
        dt: config.dt.unwrap_or(1e-3),
    };
    let report = lindblad_fock_check(&check)?;
    let reference = OscillatorEnsemble::new(report.amplitudes[0].clone(), config.gamma0)?;
    let mut header = vec!["t".to_string()];
    for i in 0..check.amplitudes.len() {
        header.extend([format!("re_a_{i}"), format!("im_a_{i}")]);
    }
    header.push("deviation".into());
    let mut table = CsvTable::new(&header);
    for (t, amps) in report.times.iter().zip(&report.amplitudes) {
        let exact = reference.evolve_amplitudes(*t)?;
        let deviation = amps
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let mut row = vec![format_float(*t)];
        for a in amps {
            row.extend([format_float(a.re), format_float(a.im)]);
        }
        row.push(format_float(deviation));
        table.push(&row);
    }
    let path = dir.join(format!("{}_fock.csv", config.scenario.name()));
    table.write(&path)?;
    out.files.push(path);

    // a sum-zero ensemble never radiates, so it has no burst to describe
    if let Ok(shape) = peak_shape(&times, &intensity) {
        out.features.push(FeatureRow {
            scenario: config.scenario,
            n_atoms: ensemble.len(),
            d: None,
            t_delay: shape.t_peak,
            peak_intensity: shape.peak,
            fwhm: shape.fwhm,
            t_min_pair_dispersion: None,
            t_min_classical_dispersion: None,
        });
    }
    Ok(())
}
