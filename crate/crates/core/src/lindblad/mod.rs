//! Time evolution of `N` two-level atoms under collective spontaneous decay,
//! `dρ/dt = (γ0/2)(2 J⁻ρJ⁺ - J⁺J⁻ρ - ρJ⁺J⁻)`, with the observables needed to
//! study the superradiant burst and the phase synchronisation behind it.
//!
//! Integration is classical fixed-step RK4 acting directly on the `2^N × 2^N`
//! density matrix. After each step the state is re-Hermitised and its trace
//! renormalised; the accumulated trace correction is tracked and a run fails
//! once it exceeds [`MAX_CUMULATIVE_TRACE_DRIFT`].
//!
//! Intensities are reported as `I = -d⟨J^z⟩/dt`. One photon changes `⟨J^z⟩`
//! by two, so the photon emission rate is `I / 2`.

mod features;
mod generator;
mod observables;

use ndarray::Array2;
use num_complex::Complex64 as C64;

pub use features::{
    earliest_argmax, earliest_argmin, extract_burst_features, peak_shape, BurstFeatures, PeakShape,
};
pub use generator::{lindblad_rhs, CollectiveDecay};
pub use observables::{
    classical_phase_dispersion, intensity_operator_form, pair_phase_dispersion, per_atom_phase,
    DipolePhase, Snapshot, INTENSITY_OPERATOR_CONSTANT, PHASE_VALIDITY_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::operators::adjoint;
use crate::state::QuantumState;
use observables::ObservableSet;

/// Largest admissible `γ0 N dt`.
pub const MAX_STEP_PARAMETER: f64 = 0.02;
/// Default `γ0 N dt`.
pub const DEFAULT_STEP_PARAMETER: f64 = 0.01;
pub const MAX_CUMULATIVE_TRACE_DRIFT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvolutionConfig {
    pub gamma0: f64,
    pub dt: f64,
    pub t_max: f64,
    pub record_stride: usize,
}

impl EvolutionConfig {
    /// Step chosen so that `γ0 N dt` equals [`DEFAULT_STEP_PARAMETER`].
    pub fn with_default_step(n_atoms: usize, gamma0: f64, t_max: f64) -> Self {
        Self {
            gamma0,
            dt: DEFAULT_STEP_PARAMETER / (gamma0 * n_atoms as f64),
            t_max,
            record_stride: 1,
        }
    }

    pub fn validate(&self, n_atoms: usize) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::Config(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let step = self.gamma0 * n_atoms as f64 * self.dt;
        if step > MAX_STEP_PARAMETER * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "gamma0 N dt = {step} exceeds {MAX_STEP_PARAMETER}"
            )));
        }
        if !(self.t_max > self.dt) {
            return Err(Error::Config(format!(
                "t_max = {} must exceed dt = {}",
                self.t_max, self.dt
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Observables at one recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    /// `⟨J^z⟩`
    pub inversion: f64,
    /// `-d⟨J^z⟩/dt` by finite differences of the recorded inversion.
    pub intensity_fd: f64,
    /// `2 γ0 ⟨J⁺J⁻⟩`
    pub intensity_op: f64,
    pub purity: f64,
    /// `⟨J⁻⟩`
    pub collective_dipole: C64,
    /// `⟨σ_i⟩` for every atom.
    pub per_atom_dipole: Vec<C64>,
    /// Mean of `D_ij` over all pairs `i < j`.
    pub pair_dispersion_mean: f64,
    /// Variance of the defined dipole-phase cosines.
    pub classical_dispersion: Option<f64>,
}

impl ObservableRecord {
    fn from_snapshot(t: f64, s: Snapshot) -> Self {
        Self {
            t,
            inversion: s.inversion,
            intensity_fd: f64::NAN,
            intensity_op: s.intensity_op,
            purity: s.purity,
            collective_dipole: s.collective_dipole,
            per_atom_dipole: s.per_atom_dipole,
            pair_dispersion_mean: s.pair_dispersion_mean,
            classical_dispersion: s.classical_dispersion,
        }
    }

    pub fn phases(&self) -> Vec<DipolePhase> {
        self.per_atom_dipole
            .iter()
            .map(|&d| DipolePhase::from_dipole(d))
            .collect()
    }

    /// `Σ_i ⟨σ_i⁺σ_i⟩ = (N + ⟨J^z⟩) / 2`.
    pub fn total_excitation(&self) -> f64 {
        (self.per_atom_dipole.len() as f64 + self.inversion) / 2.0
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub n_atoms: usize,
    pub config: EvolutionConfig,
    pub records: Vec<ObservableRecord>,
    /// Largest single-step `|Tr ρ - 1|` before renormalisation.
    pub max_step_trace_drift: f64,
    pub cumulative_trace_drift: f64,
    pub final_state: QuantumState,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Spacing between records.
    pub fn record_interval(&self) -> f64 {
        self.config.dt * self.config.record_stride as f64
    }
}

/// Fourth-order differences throughout: central in the interior, five-point
/// one-sided stencils at the two samples nearest each end. Records too short
/// for that fall back to second order.
pub(crate) fn finite_difference_intensity(inversion: &[f64], h: f64) -> Vec<f64> {
    let n = inversion.len();
    let f = inversion;
    (0..n)
        .map(|k| {
            let derivative = match n {
                0 => unreachable!(),
                1 => 0.0,
                2 => (f[1] - f[0]) / h,
                3 | 4 if k == 0 => (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h),
                3 | 4 if k == n - 1 => (3.0 * f[k] - 4.0 * f[k - 1] + f[k - 2]) / (2.0 * h),
                3 | 4 => (f[k + 1] - f[k - 1]) / (2.0 * h),
                _ if k == 0 => {
                    (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4])
                        / (12.0 * h)
                }
                _ if k == 1 => {
                    (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
                }
                _ if k == n - 1 => {
                    (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] - 16.0 * f[k - 3]
                        + 3.0 * f[k - 4])
                        / (12.0 * h)
                }
                _ if k == n - 2 => {
                    (3.0 * f[k + 1] + 10.0 * f[k] - 18.0 * f[k - 1] + 6.0 * f[k - 2] - f[k - 3])
                        / (12.0 * h)
                }
                _ => (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h),
            };
            -derivative
        })
        .collect()
}

/// Integrates the master equation from `initial` and records the observable
/// suite every `record_stride` steps.
pub fn evolve(initial: &QuantumState, config: &EvolutionConfig) -> Result<Trajectory> {
    let register = initial.register();
    config.validate(register.n_atoms())?;
    let generator = CollectiveDecay::new(register, config.gamma0)?;
    let observables = ObservableSet::new(&register, config.gamma0)?;

    let dt = config.dt;
    let steps = config.n_steps();
    let mut rho = initial.rho().clone();
    let mut records = Vec::with_capacity(steps / config.record_stride + 1);
    records.push(ObservableRecord::from_snapshot(
        0.0,
        observables.snapshot(&rho),
    ));

    let mut cumulative = 0.0;
    let mut max_step: f64 = 0.0;
    let half = C64::new(0.5, 0.0);
    for step in 1..=steps {
        let k1 = generator.rhs_hermitian(&rho);
        let k2 = generator.rhs_hermitian(&(&rho + &(&k1 * (0.5 * dt))));
        let k3 = generator.rhs_hermitian(&(&rho + &(&k2 * (0.5 * dt))));
        let k4 = generator.rhs_hermitian(&(&rho + &(&k3 * dt)));
        ndarray::Zip::from(&mut rho)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|r, &a, &b, &c, &d| *r += (a + (b + c) * 2.0 + d) * (dt / 6.0));

        let herm: Array2<C64> = (&rho + &adjoint(&rho)) * half;
        let trace = herm.diag().sum();
        let drift = (trace - 1.0).norm();
        cumulative += drift;
        max_step = max_step.max(drift);
        let t = step as f64 * dt;
        if cumulative > MAX_CUMULATIVE_TRACE_DRIFT || !drift.is_finite() {
            return Err(Error::TraceDrift {
                drift: cumulative,
                t,
            });
        }
        rho = herm / trace.re;

        if step % config.record_stride == 0 {
            records.push(ObservableRecord::from_snapshot(
                t,
                observables.snapshot(&rho),
            ));
        }
    }

    let inversion: Vec<f64> = records.iter().map(|r| r.inversion).collect();
    let h = dt * config.record_stride as f64;
    for (record, fd) in records
        .iter_mut()
        .zip(finite_difference_intensity(&inversion, h))
    {
        record.intensity_fd = fd;
    }

    Ok(Trajectory {
        n_atoms: register.n_atoms(),
        config: *config,
        records,
        max_step_trace_drift: max_step,
        cumulative_trace_drift: cumulative,
        final_state: QuantumState::from_parts_unchecked(register, rho),
    })
}

/// Result of re-running a configuration at half the step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// Largest shift of inversion, `intensity_op` or purity between the two
    /// runs at common record times, relative to each series' peak magnitude.
    pub max_relative_shift: f64,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.max_relative_shift < 1e-6
    }
}

/// Halved-step verification: evolves with `dt` and `dt / 2` and compares the
/// observables at the records both runs share.
pub fn convergence_check(
    initial: &QuantumState,
    config: &EvolutionConfig,
) -> Result<ConvergenceReport> {
    let coarse = evolve(initial, config)?;
    let fine_config = EvolutionConfig {
        dt: config.dt / 2.0,
        record_stride: config.record_stride * 2,
        ..*config
    };
    let fine = evolve(initial, &fine_config)?;
    let series: [fn(&ObservableRecord) -> f64; 3] =
        [|r| r.inversion, |r| r.intensity_op, |r| r.purity];
    let mut worst: f64 = 0.0;
    for get in series {
        let scale = coarse
            .records
            .iter()
            .map(|r| get(r).abs())
            .fold(f64::MIN_POSITIVE, f64::max);
        for (a, b) in coarse.records.iter().zip(&fine.records) {
            worst = worst.max((get(a) - get(b)).abs() / scale);
        }
    }
    Ok(ConvergenceReport {
        max_relative_shift: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::AtomRegister;
    use crate::state::{dicke_state, product_mixed_state, singlet_state, AtomSpec};

    fn config(gamma0: f64, dt: f64, t_max: f64) -> EvolutionConfig {
        EvolutionConfig {
            gamma0,
            dt,
            t_max,
            record_stride: 1,
        }
    }

    #[test]
    fn single_atom_population_decay() {
        let st = product_mixed_state(&[AtomSpec::new(1.0, 0.0, 0.0).unwrap()]).unwrap();
        let traj = evolve(&st, &config(1.0, 1e-3, 5.0)).unwrap();
        for r in &traj.records {
            let rho_ee = (1.0 + r.inversion) / 2.0;
            assert!((rho_ee - (-r.t).exp()).abs() < 1e-8, "t = {}", r.t);
        }
        assert_eq!(traj.records.len(), 5001);
    }

    #[test]
    fn single_atom_coherence_decay() {
        let st = product_mixed_state(&[AtomSpec::new(0.5, 0.5, 0.0).unwrap()]).unwrap();
        let traj = evolve(&st, &config(1.0, 1e-3, 5.0)).unwrap();
        for r in &traj.records {
            let a = r.per_atom_dipole[0].norm();
            assert!((a - 0.5 * (-r.t / 2.0).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn intensity_constant_from_finite_differences() {
        // -d⟨σ^z⟩/dt at t = 0 for the excited atom must equal c γ0 ⟨σ⁺σ⟩ = c
        let st = product_mixed_state(&[AtomSpec::new(1.0, 0.0, 0.0).unwrap()]).unwrap();
        let traj = evolve(&st, &config(1.0, 1e-3, 0.01)).unwrap();
        let h = 1e-3;
        let r = &traj.records;
        let central = -(r[2].inversion - r[0].inversion) / (2.0 * h);
        // central difference at t = h, extrapolated back by the known e^{-t}
        let at_zero = central * h.exp();
        assert!((at_zero - 2.0).abs() < 1e-6, "{at_zero}");
        assert!((r[0].intensity_op - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singlet_is_stationary() {
        let st = singlet_state();
        let traj = evolve(&st, &config(1.0, 5e-3, 10.0)).unwrap();
        assert!(traj.records.iter().all(|r| r.intensity_op.abs() <= 1e-10));
        let drift = (traj.final_state.rho() - st.rho())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-10);
    }

    #[test]
    fn config_gates() {
        let st = dicke_state(&AtomRegister::new(4).unwrap(), 4).unwrap();
        assert!(matches!(
            evolve(&st, &config(1.0, 0.006, 1.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            evolve(&st, &config(1.0, 0.005, 0.001)),
            Err(Error::Config(_))
        ));
        let mut c = config(1.0, 0.005, 1.0);
        c.record_stride = 0;
        assert!(evolve(&st, &c).is_err());
        let c = EvolutionConfig::with_default_step(4, 2.0, 1.0);
        assert!((c.gamma0 * 4.0 * c.dt - DEFAULT_STEP_PARAMETER).abs() < 1e-15);
    }

    #[test]
    fn records_are_uniformly_spaced() {
        let st = dicke_state(&AtomRegister::new(3).unwrap(), 3).unwrap();
        let mut c = config(1.0, 0.004, 1.0);
        c.record_stride = 5;
        let traj = evolve(&st, &c).unwrap();
        assert_eq!(traj.records.len(), 51);
        for w in traj.records.windows(2) {
            assert!((w[1].t - w[0].t - 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn excitation_is_nonincreasing() {
        let atoms: Vec<AtomSpec> = (0..4)
            .map(|i| AtomSpec::new(0.8, 0.3, 0.4 * i as f64 - 0.6).unwrap())
            .collect();
        let st = product_mixed_state(&atoms).unwrap();
        let traj = evolve(&st, &config(1.0, 0.0025, 4.0)).unwrap();
        for w in traj.records.windows(2) {
            assert!(w[1].total_excitation() <= w[0].total_excitation() + 1e-12);
        }
    }

    #[test]
    fn finite_difference_stencils_are_exact_on_quartics() {
        let h = 0.1;
        let f: Vec<f64> = (0..8)
            .map(|i| {
                let t = i as f64 * h;
                t.powi(4) - t.powi(3) - 2.0 * t
            })
            .collect();
        for (i, v) in finite_difference_intensity(&f, h).iter().enumerate() {
            let t = i as f64 * h;
            let exact = -(4.0 * t.powi(3) - 3.0 * t * t - 2.0);
            assert!((v - exact).abs() < 1e-12, "i = {i}: {v} vs {exact}");
        }
        // short records are exact on quadratics
        let f = [0.0, 0.01, 0.04, 0.09];
        for (i, v) in finite_difference_intensity(&f, 0.1).iter().enumerate() {
            assert!((v + 0.2 * i as f64).abs() < 1e-12, "i = {i}: {v}");
        }
    }
}
