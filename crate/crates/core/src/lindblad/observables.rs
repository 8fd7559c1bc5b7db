//! Observables recorded along a master-equation trajectory.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::operators::{
    collective_operator, cos_phase_operator, embed_single_site, local, AtomRegister,
    CollectiveKind, Operator, ZERO,
};
use crate::state::{expectation, QuantumState};

/// `I = -d⟨J^z⟩/dt = c γ0 ⟨J⁺J⁻⟩` under collective decay. With `σ^z`
/// eigenvalues ±1 every emitted photon lowers `⟨J^z⟩` by two, so `c = 2`.
pub const INTENSITY_OPERATOR_CONSTANT: f64 = 2.0;

/// Below this dipole magnitude the phase of `⟨σ_i⟩` is reported as undefined.
pub const PHASE_VALIDITY_THRESHOLD: f64 = 1e-12;

/// Magnitude and phase of a single-atom dipole `⟨σ_i⟩ = α e^{iφ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipolePhase {
    pub alpha: f64,
    pub phi: f64,
    pub valid: bool,
}

impl DipolePhase {
    pub fn from_dipole(dipole: C64) -> Self {
        let alpha = dipole.norm();
        Self {
            alpha,
            phi: dipole.arg(),
            valid: alpha >= PHASE_VALIDITY_THRESHOLD,
        }
    }

    pub fn valid_phase(&self) -> Option<f64> {
        self.valid.then_some(self.phi)
    }
}

/// `2 γ0 ⟨J⁺J⁻⟩`.
pub fn intensity_operator_form(state: &QuantumState, gamma0: f64) -> Result<f64> {
    let register = state.register();
    let jm = collective_operator(CollectiveKind::Lowering, &register)?;
    let k = jm.adjoint().dot(&jm);
    Ok(INTENSITY_OPERATOR_CONSTANT * gamma0 * expectation(&k, state)?.re)
}

pub fn per_atom_phase(state: &QuantumState, site: usize) -> Result<DipolePhase> {
    let op = embed_single_site(&local::sigma_minus(), site, &state.register())?;
    Ok(DipolePhase::from_dipole(expectation(&op, state)?))
}

/// `D_ij = ⟨(cos Φ_i - cos Φ_j)²⟩ - ⟨cos Φ_i - cos Φ_j⟩²`.
pub fn pair_phase_dispersion(state: &QuantumState, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(invalid(format!(
            "pair dispersion needs distinct sites, got {i} twice"
        )));
    }
    let register = state.register();
    let diff = &cos_phase_operator(i, &register)? - &cos_phase_operator(j, &register)?;
    let mean = expectation(&diff, state)?.re;
    let second = expectation(&diff.dot(&diff), state)?.re;
    Ok(second - mean * mean)
}

/// Sample variance of `cos φ_i` over atoms with a defined dipole phase;
/// `None` with fewer than two such atoms.
pub fn classical_phase_dispersion(state: &QuantumState) -> Result<Option<f64>> {
    let phases = (0..state.n_atoms())
        .map(|site| per_atom_phase(state, site))
        .collect::<Result<Vec<_>>>()?;
    Ok(cosine_variance(
        phases.iter().filter_map(DipolePhase::valid_phase),
    ))
}

pub(crate) fn cosine_variance(phases: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut count, mut sum, mut sum_sq) = (0usize, 0.0, 0.0);
    for phi in phases {
        let c = phi.cos();
        count += 1;
        sum += c;
        sum_sq += c * c;
    }
    (count >= 2).then(|| {
        let n = count as f64;
        (sum_sq - sum * sum / n) / (n - 1.0)
    })
}

/// Nonzero entries of an operator, for `O(nnz)` expectation values.
#[derive(Clone, Debug)]
struct SparseObservable {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseObservable {
    fn new(op: &Operator) -> Self {
        Self {
            entries: op.nonzeros(),
        }
    }

    /// `Tr(O ρ) = Σ O[r, c] ρ[c, r]`.
    fn expectation(&self, rho: &Array2<C64>) -> C64 {
        self.entries
            .iter()
            .fold(ZERO, |acc, &(r, c, v)| acc + v * rho[[c, r]])
    }
}

struct PairObservable {
    diff: SparseObservable,
    diff_sq: SparseObservable,
}

/// All observables of one record, evaluated from a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub inversion: f64,
    pub intensity_op: f64,
    pub purity: f64,
    pub collective_dipole: C64,
    pub per_atom_dipole: Vec<C64>,
    pub pair_dispersion_mean: f64,
    pub classical_dispersion: Option<f64>,
}

/// Operators of the full observable suite, built once per register.
pub(crate) struct ObservableSet {
    gamma0: f64,
    inversion: SparseObservable,
    emission: SparseObservable,
    lowering: SparseObservable,
    site_lowering: Vec<SparseObservable>,
    pairs: Vec<PairObservable>,
}

impl ObservableSet {
    pub(crate) fn new(register: &AtomRegister, gamma0: f64) -> Result<Self> {
        let n = register.n_atoms();
        let jm = collective_operator(CollectiveKind::Lowering, register)?;
        let jz = collective_operator(CollectiveKind::Inversion, register)?;
        let emission = jm.adjoint().dot(&jm);
        let site_lowering = (0..n)
            .map(|site| {
                embed_single_site(&local::sigma_minus(), site, register)
                    .map(|op| SparseObservable::new(&op))
            })
            .collect::<Result<Vec<_>>>()?;
        let cos = (0..n)
            .map(|site| cos_phase_operator(site, register))
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let diff = &cos[i] - &cos[j];
                pairs.push(PairObservable {
                    diff_sq: SparseObservable::new(&diff.dot(&diff)),
                    diff: SparseObservable::new(&diff),
                });
            }
        }
        Ok(Self {
            gamma0,
            inversion: SparseObservable::new(&jz),
            emission: SparseObservable::new(&emission),
            lowering: SparseObservable::new(&jm),
            site_lowering,
            pairs,
        })
    }

    pub(crate) fn snapshot(&self, rho: &Array2<C64>) -> Snapshot {
        let per_atom_dipole: Vec<C64> = self
            .site_lowering
            .iter()
            .map(|op| op.expectation(rho))
            .collect();
        let pair_dispersion_mean = if self.pairs.is_empty() {
            0.0
        } else {
            self.pairs
                .iter()
                .map(|p| {
                    let mean = p.diff.expectation(rho).re;
                    p.diff_sq.expectation(rho).re - mean * mean
                })
                .sum::<f64>()
                / self.pairs.len() as f64
        };
        let classical_dispersion = cosine_variance(
            per_atom_dipole
                .iter()
                .filter_map(|&d| DipolePhase::from_dipole(d).valid_phase()),
        );
        Snapshot {
            inversion: self.inversion.expectation(rho).re,
            intensity_op: INTENSITY_OPERATOR_CONSTANT
                * self.gamma0
                * self.emission.expectation(rho).re,
            purity: crate::state::purity_of(rho),
            collective_dipole: self.lowering.expectation(rho),
            per_atom_dipole,
            pair_dispersion_mean,
            classical_dispersion,
        }
    }
}
