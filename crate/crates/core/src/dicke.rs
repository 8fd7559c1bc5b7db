//! Mean-field Dicke model of collective emission.
//!
//! The inversion `⟨J^z⟩` obeys the scalar ODE
//! `d⟨J^z⟩/dt = -γ0 (N²/4 + N/2 - ⟨J^z⟩²/4 + ⟨J^z⟩/2)`, whose solution is a
//! `tanh` profile and whose emitted intensity `-d⟨J^z⟩/dt` is a `sech²` burst.

use crate::error::{invalid, Error, Result};

/// Largest admissible `γ0 (N + 1) dt` for the fixed-step integrator.
pub const MAX_STEP_PARAMETER: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DickeParams {
    n_atoms: usize,
    gamma0: f64,
}

impl DickeParams {
    pub fn new(n_atoms: usize, gamma0: f64) -> Result<Self> {
        if n_atoms == 0 {
            return Err(invalid("Dicke model needs N >= 1"));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(invalid(format!("gamma0 must be positive, got {gamma0}")));
        }
        Ok(Self { n_atoms, gamma0 })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    fn n(&self) -> f64 {
        self.n_atoms as f64
    }

    /// Rate constant `γ0 (N + 1) / 4` inside the `tanh`/`sech²` arguments.
    fn width_rate(&self) -> f64 {
        self.gamma0 * (self.n() + 1.0) / 4.0
    }
}

/// Delay of the burst from the fully excited state: `2 ln N / (γ0 (N + 1))`.
pub fn delay_time(params: &DickeParams) -> f64 {
    2.0 * params.n().ln() / (params.gamma0 * (params.n() + 1.0))
}

/// Delay time for an arbitrary initial inversion `j0`, from inverting the
/// closed-form solution; zero once `j0 <= 1` (the burst starts immediately).
pub fn delay_time_from_inversion(params: &DickeParams, j0: f64) -> f64 {
    if j0 <= 1.0 {
        return 0.0;
    }
    -(1.0 / params.width_rate()) * ((1.0 - j0) / (params.n() + 1.0)).atanh()
}

/// `⟨J^z(t)⟩ = 1 - (N + 1) tanh(γ0 (N + 1)(t - t_delay) / 4)`.
pub fn inversion_closed_form(t: f64, params: &DickeParams, t_delay: f64) -> f64 {
    1.0 - (params.n() + 1.0) * (params.width_rate() * (t - t_delay)).tanh()
}

/// `I(t) = γ0 ((N + 1)/2)² sech²(γ0 (N + 1)(t - t_delay) / 4)`.
pub fn intensity_closed_form(t: f64, params: &DickeParams, t_delay: f64) -> f64 {
    let half = (params.n() + 1.0) / 2.0;
    let sech = 1.0 / (params.width_rate() * (t - t_delay)).cosh();
    params.gamma0 * half * half * sech * sech
}

/// Right-hand side of the Dicke equation.
///
/// Evaluated in the factored form `-(γ0/4)(N + J)(N + 2 - J)`, which vanishes
/// exactly at `J = -N` and is nonpositive on `[-N, N]`.
pub fn dicke_rhs(params: &DickeParams, inversion: f64) -> f64 {
    let n = params.n();
    -(params.gamma0 / 4.0) * (n + inversion) * (n + 2.0 - inversion)
}

/// Sampled solution of the Dicke equation.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticTrajectory {
    pub times: Vec<f64>,
    pub inversion: Vec<f64>,
    /// `-d⟨J^z⟩/dt`, evaluated from the ODE right-hand side at each sample.
    pub intensity: Vec<f64>,
}

impl AnalyticTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the first intensity maximum.
    pub fn peak_time(&self) -> f64 {
        let mut best = 0;
        for (i, &v) in self.intensity.iter().enumerate() {
            if v > self.intensity[best] {
                best = i;
            }
        }
        self.times[best]
    }
}

/// Classical RK4 integration of the Dicke equation on `[0, t_max]`.
pub fn integrate_dicke_ode(
    params: &DickeParams,
    initial_inversion: f64,
    t_max: f64,
    dt: f64,
) -> Result<AnalyticTrajectory> {
    let n = params.n();
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(Error::Config(format!(
            "dt and t_max must be positive (dt = {dt}, t_max = {t_max})"
        )));
    }
    let step_parameter = params.gamma0 * (n + 1.0) * dt;
    if step_parameter > MAX_STEP_PARAMETER {
        return Err(Error::Config(format!(
            "gamma0 (N+1) dt = {step_parameter} exceeds {MAX_STEP_PARAMETER}"
        )));
    }
    if !(-n..=n).contains(&initial_inversion) {
        return Err(invalid(format!(
            "initial inversion {initial_inversion} outside [-{n}, {n}]"
        )));
    }

    let steps = ((t_max / dt).round() as usize).max(1);
    let f = |j: f64| dicke_rhs(params, j);
    let mut traj = AnalyticTrajectory {
        times: Vec::with_capacity(steps + 1),
        inversion: Vec::with_capacity(steps + 1),
        intensity: Vec::with_capacity(steps + 1),
    };
    let mut j = initial_inversion;
    for step in 0..=steps {
        traj.times.push(step as f64 * dt);
        traj.inversion.push(j);
        traj.intensity.push(-f(j));
        if step == steps {
            break;
        }
        let k1 = f(j);
        let k2 = f(j + 0.5 * dt * k1);
        let k3 = f(j + 0.5 * dt * k2);
        let k4 = f(j + dt * k3);
        j += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(traj)
}

/// Transition rate out of `|N, n⟩`: `γ0 n (N - n + 1) / 2`.
pub fn rate_ladder(n: usize, params: &DickeParams) -> Result<f64> {
    if n == 0 || n > params.n_atoms {
        return Err(invalid(format!(
            "excitation count {n} outside [1, {}]",
            params.n_atoms
        )));
    }
    let n = n as f64;
    Ok(params.gamma0 * n * (params.n() - n + 1.0) / 2.0)
}

/// Mean time to descend the ladder from `|N, N⟩` to `|N, N/2⟩`: the exact sum
/// of inverse rates for `n = ⌈N/2⌉ ..= N`.
pub fn ladder_transition_time(params: &DickeParams) -> f64 {
    let n_atoms = params.n_atoms;
    (n_atoms.div_ceil(2)..=n_atoms)
        .map(|n| 1.0 / rate_ladder(n.max(1), params).expect("n within ladder"))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(n: usize) -> DickeParams {
        DickeParams::new(n, 1.0).unwrap()
    }

    #[test]
    fn delay_time_values() {
        assert_abs_diff_eq!(delay_time(&p(8)), 2.0 * 8f64.ln() / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delay_time(&p(8)), 0.46209, epsilon = 1e-5);
        assert_eq!(delay_time(&p(1)), 0.0);
        assert_abs_diff_eq!(delay_time(&p(200)), 0.05272, epsilon = 1e-5);
    }

    #[test]
    fn closed_form_landmarks() {
        for n in [2, 8, 50, 200] {
            let params = p(n);
            let td = delay_time(&params);
            assert_abs_diff_eq!(inversion_closed_form(td, &params, td), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                inversion_closed_form(0.0, &params, td),
                n as f64,
                epsilon = 1e-10 * n as f64
            );
            assert_abs_diff_eq!(
                inversion_closed_form(1e3, &params, td),
                -(n as f64),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                delay_time_from_inversion(&params, n as f64),
                td,
                epsilon = 1e-12
            );
        }
        assert_eq!(delay_time_from_inversion(&p(8), 1.0), 0.0);
        assert_eq!(delay_time_from_inversion(&p(8), -3.0), 0.0);
    }

    #[test]
    fn burst_peak_and_symmetry() {
        let params = p(8);
        let td = delay_time(&params);
        assert_abs_diff_eq!(
            intensity_closed_form(td, &params, td),
            20.25,
            epsilon = 1e-12
        );
        for tau in [0.01, 0.1, 0.3] {
            assert_abs_diff_eq!(
                intensity_closed_form(td + tau, &params, td),
                intensity_closed_form(td - tau, &params, td),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn intensity_is_negative_derivative_of_inversion() {
        // central finite difference oracle, h = 1e-6 / γ0
        let params = p(8);
        let td = delay_time(&params);
        let h = 1e-6;
        for i in 0..50 {
            let t = 0.02 * i as f64 + h;
            let fd = -(inversion_closed_form(t + h, &params, td)
                - inversion_closed_form(t - h, &params, td))
                / (2.0 * h);
            let scale = intensity_closed_form(td, &params, td);
            let err = (fd - intensity_closed_form(t, &params, td)).abs();
            assert!(err <= 1e-9 * scale, "t = {t}: error {err}");
        }
    }

    #[test]
    fn closed_form_solves_the_ode() {
        // RHS = -(γ0/4)[(N+1)² - (J-1)²] must equal d/dt of the closed form.
        for n in [3, 8, 40] {
            let params = DickeParams::new(n, 0.7).unwrap();
            let td = delay_time(&params);
            for i in 0..100 {
                let t = 3.0 * td * i as f64 / 99.0;
                let j = inversion_closed_form(t, &params, td);
                let nn = n as f64 + 1.0;
                let rhs = -(params.gamma0() / 4.0) * (nn * nn - (j - 1.0).powi(2));
                assert_abs_diff_eq!(dicke_rhs(&params, j), rhs, epsilon = 1e-9 * nn * nn);
                assert_abs_diff_eq!(
                    -rhs,
                    intensity_closed_form(t, &params, td),
                    epsilon = 1e-9 * nn * nn
                );
            }
        }
    }

    #[test]
    fn rk4_tracks_closed_form() {
        let params = p(8);
        let td = delay_time(&params);
        let dt = 4e-3 / 9.0;
        let traj = integrate_dicke_ode(&params, 8.0, 5.0 * td, dt).unwrap();
        let err = traj
            .times
            .iter()
            .zip(&traj.inversion)
            .map(|(&t, &j)| (j - inversion_closed_form(t, &params, td)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6 * 8.0, "max error {err}");
    }

    #[test]
    fn ground_state_is_a_fixed_point() {
        let traj = integrate_dicke_ode(&p(6), -6.0, 2.0, 1e-3).unwrap();
        assert!(traj.inversion.iter().all(|&j| j == -6.0));
        assert!(traj.intensity.iter().all(|&i| i == 0.0));
    }

    #[test]
    fn half_inversion_peaks_immediately() {
        let traj = integrate_dicke_ode(&p(20), 1.0, 1.0, 1e-4).unwrap();
        assert_eq!(traj.peak_time(), 0.0);
    }

    #[test]
    fn step_gate() {
        assert!(matches!(
            integrate_dicke_ode(&p(9), 9.0, 1.0, 0.011),
            Err(Error::Config(_))
        ));
        assert!(integrate_dicke_ode(&p(9), 9.0, 1.0, 0.01).is_ok());
        assert!(integrate_dicke_ode(&p(9), 10.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn ladder_rates() {
        let params = DickeParams::new(10, 2.0).unwrap();
        assert_abs_diff_eq!(rate_ladder(10, &params).unwrap(), 2.0 * 10.0 / 2.0);
        assert_abs_diff_eq!(rate_ladder(5, &params).unwrap(), 2.0 * 5.0 * 6.0 / 2.0);
        for n in 1..=10 {
            assert_abs_diff_eq!(
                rate_ladder(n, &params).unwrap(),
                rate_ladder(10 - n + 1, &params).unwrap()
            );
        }
        assert!(rate_ladder(0, &params).is_err());
        assert!(rate_ladder(11, &params).is_err());
    }

    #[test]
    fn ladder_sum_two_atoms() {
        assert_abs_diff_eq!(ladder_transition_time(&p(2)), 2.0, epsilon = 1e-15);
        let params = DickeParams::new(2, 4.0).unwrap();
        assert_abs_diff_eq!(ladder_transition_time(&params), 0.5, epsilon = 1e-15);
    }
}
