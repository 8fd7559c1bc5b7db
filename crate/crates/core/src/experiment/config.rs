use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lindblad::{EvolutionConfig, DEFAULT_STEP_PARAMETER};
use crate::state::AtomSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig1PartialDicke,
    Fig2Purity,
    Fig3NondickeBurst,
    Fig4PhaseTrajectories,
    Fig5Dispersions,
    Fig6DipoleSweep,
    OscillatorNull,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Fig1PartialDicke,
        Scenario::Fig2Purity,
        Scenario::Fig3NondickeBurst,
        Scenario::Fig4PhaseTrajectories,
        Scenario::Fig5Dispersions,
        Scenario::Fig6DipoleSweep,
        Scenario::OscillatorNull,
        Scenario::Custom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig1PartialDicke => "fig1_partial_dicke",
            Scenario::Fig2Purity => "fig2_purity",
            Scenario::Fig3NondickeBurst => "fig3_nondicke_burst",
            Scenario::Fig4PhaseTrajectories => "fig4_phase_trajectories",
            Scenario::Fig5Dispersions => "fig5_dispersions",
            Scenario::Fig6DipoleSweep => "fig6_dipole_sweep",
            Scenario::OscillatorNull => "oscillator_null",
            Scenario::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// How phases are spread over `(-phase_spread, phase_spread)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseLayout {
    /// Evenly spaced, endpoints included.
    #[default]
    Grid,
    /// Independent uniform draws from a seeded generator.
    Random { seed: u64 },
}

impl PhaseLayout {
    pub fn phases(&self, n_atoms: usize, half_width: f64) -> Vec<f64> {
        match *self {
            PhaseLayout::Grid if n_atoms == 1 => vec![0.0],
            PhaseLayout::Grid => (0..n_atoms)
                .map(|i| -half_width + 2.0 * half_width * i as f64 / (n_atoms - 1) as f64)
                .collect(),
            PhaseLayout::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n_atoms)
                    .map(|_| {
                        if half_width > 0.0 {
                            rng.random_range(-half_width..half_width)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Dicke state with `n` excited atoms.
    Dicke { n: usize },
    /// Explicit per-atom mixed states.
    Product(Vec<AtomSpec>),
    /// Two-atom antisymmetric state.
    Singlet,
    /// Pure single-atom states carrying dipole magnitude `d` each, with
    /// phases spread over `(-phase_spread, phase_spread)`.
    FromDipole {
        d: f64,
        #[serde(default)]
        phase_spread: f64,
        #[serde(default)]
        layout: PhaseLayout,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DipoleMagnitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Half-width of the phase spread used for every sweep point.
    #[serde(default)]
    pub phase_spread: f64,
}

/// Fock-space settings of the oscillator control case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    /// Initial mean amplitudes as `[re, im]` pairs, one per oscillator.
    pub amplitudes: Vec<[f64; 2]>,
    /// Amplitudes of the two-oscillator truncated Fock-space check.
    #[serde(default = "default_fock_amplitudes")]
    pub fock_amplitudes: Vec<[f64; 2]>,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: usize,
}

fn default_fock_amplitudes() -> Vec<[f64; 2]> {
    vec![[0.2, 0.0], [0.2, 0.0]]
}

fn default_fock_cutoff() -> usize {
    4
}

fn default_gamma0() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n_atoms: usize,
    #[serde(default = "default_gamma0")]
    pub gamma0: f64,
    /// Integration step; defaults to `γ0 N dt = 0.01` for the master equation
    /// and `γ0 (N + 1) dt = 0.004` for the Dicke equation.
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_max: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub oscillator: Option<OscillatorSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Dipole magnitude parameter `d = 2√(k(1-k))` of a pure atom with
/// excited-state population `k`; inverse of [`pure_state_from_dipole`].
pub fn dipole_for_excitation(k: f64) -> f64 {
    2.0 * (k * (1.0 - k)).sqrt()
}

/// Pure single-atom state with dipole magnitude parameter `d`:
/// `k = (1 + √(1 - d²))/2`, `α = √(k(1-k)) = d/2`.
pub fn pure_state_from_dipole(d: f64, phi: f64) -> Result<AtomSpec> {
    if !(0.0..1.0).contains(&d) {
        return Err(invalid(format!("dipole magnitude {d} outside [0, 1)")));
    }
    let k = (1.0 + (1.0 - d * d).sqrt()) / 2.0;
    let alpha = (k * (1.0 - k)).max(0.0).sqrt();
    AtomSpec::new(k, alpha, phi)
}

pub(crate) fn atoms_from_dipole(
    n_atoms: usize,
    d: f64,
    phase_spread: f64,
    layout: PhaseLayout,
) -> Result<Vec<AtomSpec>> {
    layout
        .phases(n_atoms, phase_spread)
        .into_iter()
        .map(|phi| pure_state_from_dipole(d, phi))
        .collect()
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Built-in configuration reproducing one of the reference scenarios.
    pub fn preset(scenario: Scenario) -> Self {
        let base = |n_atoms: usize, t_max: f64| Self {
            scenario,
            n_atoms,
            gamma0: 1.0,
            dt: None,
            t_max,
            record_stride: 1,
            initial_state: None,
            sweep: None,
            oscillator: None,
            output_dir: default_output_dir(),
        };
        // mostly excited pure atoms (k = 0.95) with phases across (-π/5, π/5)
        let nondicke = InitialState::FromDipole {
            d: dipole_for_excitation(0.95),
            phase_spread: PI / 5.0,
            layout: PhaseLayout::Grid,
        };
        match scenario {
            Scenario::Fig1PartialDicke => base(100, 0.5),
            Scenario::Fig2Purity => Self {
                initial_state: Some(InitialState::Dicke { n: 8 }),
                record_stride: 8,
                ..base(8, 10.0)
            },
            Scenario::Fig3NondickeBurst
            | Scenario::Fig4PhaseTrajectories
            | Scenario::Fig5Dispersions
            | Scenario::Custom => Self {
                initial_state: Some(nondicke),
                record_stride: 2,
                ..base(8, 3.0)
            },
            Scenario::Fig6DipoleSweep => Self {
                sweep: Some(SweepSpec {
                    parameter: SweepParameter::DipoleMagnitude,
                    values: (1..=9).map(|i| i as f64 / 10.0).collect(),
                    phase_spread: 0.0,
                }),
                ..base(6, 3.0)
            },
            Scenario::OscillatorNull => Self {
                oscillator: Some(OscillatorSpec {
                    amplitudes: (0..8)
                        .map(|i| {
                            let phi = -PI / 5.0 + 2.0 * PI / 5.0 * i as f64 / 7.0;
                            [0.3 * phi.cos(), 0.3 * phi.sin()]
                        })
                        .collect(),
                    fock_amplitudes: default_fock_amplitudes(),
                    fock_cutoff: default_fock_cutoff(),
                }),
                dt: Some(1e-3 / 8.0),
                ..base(8, 3.0)
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_atoms == 0 {
            return fail("n_atoms must be at least 1".into());
        }
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return fail(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if !(self.t_max > 0.0) {
            return fail(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.dt.is_some_and(|dt| !(dt > 0.0)) {
            return fail("dt must be positive".into());
        }
        if self.record_stride == 0 {
            return fail("record_stride must be at least 1".into());
        }
        if let Some(state) = &self.initial_state {
            state.validate(self.n_atoms)?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return fail("sweep needs at least one value".into());
            }
            if sweep.values.windows(2).any(|w| !(w[1] > w[0])) {
                return fail("sweep values must be distinct and sorted ascending".into());
            }
            if let Some(bad) = sweep.values.iter().find(|d| !(0.0..1.0).contains(*d)) {
                return fail(format!("sweep dipole magnitude {bad} outside [0, 1)"));
            }
        }
        match self.scenario {
            Scenario::Fig1PartialDicke => {}
            Scenario::Fig6DipoleSweep if self.sweep.is_none() => {
                return fail("fig6_dipole_sweep requires a sweep".into());
            }
            Scenario::Fig6DipoleSweep => {}
            Scenario::OscillatorNull => match &self.oscillator {
                None => return fail("oscillator_null requires an oscillator block".into()),
                Some(osc) if osc.amplitudes.is_empty() => {
                    return fail("oscillator amplitudes must not be empty".into())
                }
                Some(_) => {}
            },
            _ if self.initial_state.is_none() && self.sweep.is_none() => {
                return fail(format!(
                    "{} requires an initial_state",
                    self.scenario.name()
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Master-equation step settings implied by this configuration.
    pub fn evolution_config(&self) -> EvolutionConfig {
        EvolutionConfig {
            gamma0: self.gamma0,
            dt: self
                .dt
                .unwrap_or(DEFAULT_STEP_PARAMETER / (self.gamma0 * self.n_atoms as f64)),
            t_max: self.t_max,
            record_stride: self.record_stride,
        }
    }
}

impl InitialState {
    pub fn validate(&self, n_atoms: usize) -> Result<()> {
        match self {
            InitialState::Dicke { n } if *n > n_atoms => Err(Error::Config(format!(
                "Dicke state with {n} excitations in {n_atoms} atoms"
            ))),
            InitialState::Product(atoms) if atoms.len() != n_atoms => Err(Error::Config(format!(
                "{} atom specs given for {n_atoms} atoms",
                atoms.len()
            ))),
            InitialState::Product(atoms) => atoms.iter().try_for_each(AtomSpec::validate),
            InitialState::Singlet if n_atoms != 2 => Err(Error::Config(
                "the singlet state needs exactly 2 atoms".into(),
            )),
            InitialState::FromDipole {
                d, phase_spread, ..
            } => {
                if !(0.0..1.0).contains(d) {
                    return Err(Error::Config(format!(
                        "dipole magnitude {d} outside [0, 1)"
                    )));
                }
                if !(*phase_spread >= 0.0 && phase_spread.is_finite()) {
                    return Err(Error::Config(
                        "phase_spread must be a nonnegative number".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Dipole magnitude parameter, when the state is defined by one.
    pub fn dipole(&self) -> Option<f64> {
        match self {
            InitialState::FromDipole { d, .. } => Some(*d),
            _ => None,
        }
    }
}
