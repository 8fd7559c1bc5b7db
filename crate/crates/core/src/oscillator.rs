//! Collectively damped linear oscillators: the control case without
//! saturation.
//!
//! The mean amplitudes obey `d⟨a_i⟩/dt = -(γ0/2) Σ_k ⟨a_k⟩`. The generator is a
//! multiple of the all-ones matrix, so the sum `S = Σ_k ⟨a_k⟩` decays as
//! `e^{-Nγ0 t/2}` while every difference `⟨a_i⟩ - ⟨a_j⟩` is conserved. `|S|²`
//! can therefore only decrease: there is no burst.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::operators::{adjoint, embed_local, Operator, ZERO};
use crate::state::trace_product;

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorEnsemble {
    amplitudes: Vec<C64>,
    gamma0: f64,
}

impl OscillatorEnsemble {
    pub fn new(amplitudes: Vec<C64>, gamma0: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("oscillator ensemble must not be empty"));
        }
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(invalid(format!("gamma0 must be positive, got {gamma0}")));
        }
        Ok(Self { amplitudes, gamma0 })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `S(0) = Σ_k ⟨a_k(0)⟩`.
    pub fn collective_amplitude(&self) -> C64 {
        self.amplitudes.iter().sum()
    }

    fn decay_rate(&self) -> f64 {
        self.len() as f64 * self.gamma0 / 2.0
    }

    /// Exact amplitudes at time `t`:
    /// `a_i(t) = a_i(0) - (S(0)/N)(1 - e^{-Nγ0 t/2})`.
    pub fn evolve_amplitudes(&self, t: f64) -> Result<Vec<C64>> {
        check_time(t)?;
        let shift = self.collective_amplitude() / self.len() as f64
            * (1.0 - (-self.decay_rate() * t).exp());
        Ok(self.amplitudes.iter().map(|&a| a - shift).collect())
    }

    /// RK4 integration of the amplitude equations, for cross-checking.
    pub fn evolve_amplitudes_rk4(&self, t: f64, dt: f64) -> Result<Vec<C64>> {
        check_time(t)?;
        if !(dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        let rate = -self.gamma0 / 2.0;
        let derivative = |a: &[C64]| -> C64 { a.iter().sum::<C64>() * rate };
        let steps = (t / dt).round() as usize;
        let mut a = self.amplitudes.clone();
        let mut tmp = vec![ZERO; a.len()];
        for _ in 0..steps {
            // every component has the same derivative
            let k1 = derivative(&a);
            shifted(&a, k1 * (dt / 2.0), &mut tmp);
            let k2 = derivative(&tmp);
            shifted(&a, k2 * (dt / 2.0), &mut tmp);
            let k3 = derivative(&tmp);
            shifted(&a, k3 * dt, &mut tmp);
            let k4 = derivative(&tmp);
            let inc = (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
            a.iter_mut().for_each(|x| *x += inc);
        }
        Ok(a)
    }

    /// `S(t) = S(0) e^{-Nγ0 t/2}` at each requested time.
    pub fn collective_dipole_series(&self, times: &[f64]) -> Result<Vec<C64>> {
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times must be strictly increasing"));
        }
        let s0 = self.collective_amplitude();
        times
            .iter()
            .map(|&t| {
                check_time(t)?;
                Ok(s0 * (-self.decay_rate() * t).exp())
            })
            .collect()
    }
}

fn shifted(a: &[C64], by: C64, out: &mut [C64]) {
    for (o, x) in out.iter_mut().zip(a) {
        *o = *x + by;
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// The amplitude generator `-(γ0/2)·𝟙𝟙ᵀ`.
pub fn amplitude_generator(n: usize, gamma0: f64) -> Array2<f64> {
    Array2::from_elem((n, n), -gamma0 / 2.0)
}

/// Largest admissible truncation tail of the initial Fock-space state.
pub const MAX_FOCK_TAIL: f64 = 1e-6;

/// Number-basis simulation of collectively damped oscillators.
#[derive(Clone, Debug, PartialEq)]
pub struct FockCheck {
    /// Highest retained Fock level per oscillator.
    pub cutoff: usize,
    /// Coherent amplitudes of the initial product state.
    pub amplitudes: Vec<C64>,
    pub gamma0: f64,
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockCheckReport {
    /// `max_{t,i} |⟨a_i⟩(t) - closed form|`.
    pub max_deviation: f64,
    /// Initial population lost by truncating the coherent states.
    pub truncation_tail: f64,
    /// Largest population found in any oscillator's top retained level.
    pub max_top_level_population: f64,
    pub times: Vec<f64>,
    /// `⟨a_i⟩(t)` from the density matrix, one row per time.
    pub amplitudes: Vec<Vec<C64>>,
}

/// Population of a coherent state above `cutoff`.
fn coherent_tail(alpha: C64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    // term_n = e^{-x} x^n / n!
    let mut term = (-x).exp();
    for n in 1..=cutoff {
        term *= x / n as f64;
    }
    let mut tail = 0.0;
    let mut n = cutoff;
    loop {
        n += 1;
        term *= x / n as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 {
            break;
        }
    }
    tail
}

fn truncated_coherent(alpha: C64, cutoff: usize) -> Array1<C64> {
    let mut v = Array1::zeros(cutoff + 1);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    v[0] = c;
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        v[n] = c;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v / C64::new(norm, 0.0)
}

fn annihilation(cutoff: usize) -> Array2<C64> {
    let mut a = Array2::zeros((cutoff + 1, cutoff + 1));
    for n in 1..=cutoff {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Evolves truncated Fock-space oscillators under the collective-damping
/// master equation with jump operator `A = Σ_i a_i` and compares the mean
/// amplitudes to the closed-form amplitude dynamics.
pub fn lindblad_fock_check(check: &FockCheck) -> Result<FockCheckReport> {
    let n_osc = check.amplitudes.len();
    if n_osc == 0 {
        return Err(invalid("need at least one oscillator"));
    }
    if check.cutoff == 0 {
        return Err(invalid("Fock cutoff must be at least 1"));
    }
    let local_dim = check.cutoff + 1;
    if local_dim.checked_pow(n_osc as u32).is_none_or(|d| d > 1024) {
        return Err(invalid(format!(
            "{n_osc} oscillators with cutoff {} exceed the dense Fock-space limit",
            check.cutoff
        )));
    }
    if !(check.gamma0 > 0.0) || !(check.dt > 0.0) || !(check.t_max >= 0.0) {
        return Err(invalid("gamma0 and dt must be positive, t_max nonnegative"));
    }

    let truncation_tail = check
        .amplitudes
        .iter()
        .map(|&a| coherent_tail(a, check.cutoff))
        .sum::<f64>();
    if truncation_tail > MAX_FOCK_TAIL {
        return Err(Error::CutoffLeak {
            tail: truncation_tail,
        });
    }

    let local_a = annihilation(check.cutoff);
    let site_ops = (0..n_osc)
        .map(|i| embed_local(&local_a, i, n_osc))
        .collect::<Result<Vec<Operator>>>()?;
    let mut top = Array2::zeros((local_dim, local_dim));
    top[[check.cutoff, check.cutoff]] = C64::new(1.0, 0.0);
    let top_ops = (0..n_osc)
        .map(|i| embed_local(&top, i, n_osc))
        .collect::<Result<Vec<Operator>>>()?;

    let jump = site_ops
        .iter()
        .skip(1)
        .fold(site_ops[0].clone(), |acc, op| &acc + op)
        .into_matrix();
    let jump_dag = adjoint(&jump);
    let number = jump_dag.dot(&jump);
    let g = check.gamma0;
    let rhs = |rho: &Array2<C64>| -> Array2<C64> {
        let gain = jump.dot(rho).dot(&jump_dag) * C64::new(2.0, 0.0);
        (gain - number.dot(rho) - rho.dot(&number)) * C64::new(g / 2.0, 0.0)
    };

    let psi = check
        .amplitudes
        .iter()
        .map(|&a| truncated_coherent(a, check.cutoff))
        .reduce(|acc, v| {
            let mut out = Array1::zeros(acc.len() * v.len());
            for (i, x) in acc.iter().enumerate() {
                for (j, y) in v.iter().enumerate() {
                    out[i * v.len() + j] = x * y;
                }
            }
            out
        })
        .expect("non-empty");
    let dim = psi.len();
    let mut rho = Array2::from_shape_fn((dim, dim), |(r, c)| psi[r] * psi[c].conj());

    let measure = |rho: &Array2<C64>| -> Vec<C64> {
        site_ops
            .iter()
            .map(|op| trace_product(op.matrix(), rho))
            .collect()
    };
    let top_population = |rho: &Array2<C64>| -> f64 {
        top_ops
            .iter()
            .map(|op| trace_product(op.matrix(), rho).re)
            .fold(0.0, f64::max)
    };

    // The reference trajectory starts from the truncated state's own means.
    let initial = measure(&rho);
    let reference = OscillatorEnsemble::new(initial.clone(), check.gamma0)?;

    let dt = check.dt;
    let steps = (check.t_max / dt).round() as usize;
    let mut report = FockCheckReport {
        max_deviation: 0.0,
        truncation_tail,
        max_top_level_population: top_population(&rho),
        times: vec![0.0],
        amplitudes: vec![initial],
    };
    for step in 1..=steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &(&k1 * C64::new(dt / 2.0, 0.0))));
        let k3 = rhs(&(&rho + &(&k2 * C64::new(dt / 2.0, 0.0))));
        let k4 = rhs(&(&rho + &(&k3 * C64::new(dt, 0.0))));
        rho = &rho + &((k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0));

        let t = step as f64 * dt;
        let measured = measure(&rho);
        let exact = reference.evolve_amplitudes(t)?;
        for (m, e) in measured.iter().zip(&exact) {
            report.max_deviation = report.max_deviation.max((m - e).norm());
        }
        report.max_top_level_population = report.max_top_level_population.max(top_population(&rho));
        report.times.push(t);
        report.amplitudes.push(measured);
    }
    Ok(report)
}
