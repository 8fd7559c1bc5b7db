//! Density matrices of atomic ensembles and their standard constructors.

use std::f64::consts::PI;

use itertools::Itertools;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::operators::{hermiticity_error, AtomRegister, Operator, ONE, ZERO};

const TRACE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
const PURITY_TOL: f64 = 1e-9;

/// Density matrix of `n_atoms` two-level atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    register: AtomRegister,
    rho: Array2<C64>,
}

impl QuantumState {
    /// Validates trace, Hermiticity and purity bounds.
    pub fn from_density_matrix(register: &AtomRegister, rho: Array2<C64>) -> Result<Self> {
        let dim = register.dim();
        if rho.dim() != (dim, dim) {
            return Err(invalid(format!(
                "density matrix must be {dim}x{dim}, got {:?}",
                rho.dim()
            )));
        }
        let state = Self {
            register: *register,
            rho,
        };
        let trace = state.trace();
        if (trace - ONE).norm() > TRACE_TOL {
            return Err(invalid(format!("trace {trace} differs from 1")));
        }
        let herm = hermiticity_error(&state.rho);
        if herm > HERMITIAN_TOL {
            return Err(invalid(format!(
                "density matrix not Hermitian ({herm:.3e})"
            )));
        }
        let p = state.purity();
        if !(p > 0.0 && p <= 1.0 + PURITY_TOL) {
            return Err(invalid(format!("purity {p} outside (0, 1]")));
        }
        Ok(state)
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn from_pure_vector(register: &AtomRegister, psi: &Array1<C64>) -> Result<Self> {
        if psi.len() != register.dim() {
            return Err(invalid(format!(
                "state vector must have length {}, got {}",
                register.dim(),
                psi.len()
            )));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(invalid(format!("state vector norm² {norm} differs from 1")));
        }
        let dim = psi.len();
        let rho = Array2::from_shape_fn((dim, dim), |(r, c)| psi[r] * psi[c].conj());
        Self::from_density_matrix(register, rho)
    }

    /// Wraps a matrix produced by the integrator without re-validating.
    pub(crate) fn from_parts_unchecked(register: AtomRegister, rho: Array2<C64>) -> Self {
        Self { register, rho }
    }

    pub fn n_atoms(&self) -> usize {
        self.register.n_atoms()
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &Array2<C64> {
        &self.rho
    }

    pub fn into_rho(self) -> Array2<C64> {
        self.rho
    }

    pub fn register(&self) -> AtomRegister {
        self.register
    }

    pub fn trace(&self) -> C64 {
        self.rho.diag().sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        purity_of(&self.rho)
    }
}

pub(crate) fn purity_of(rho: &Array2<C64>) -> f64 {
    let n = rho.nrows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            acc += (rho[[r, c]] * rho[[c, r]]).re;
        }
    }
    acc
}

/// Free-function form of [`QuantumState::purity`].
pub fn purity(state: &QuantumState) -> f64 {
    state.purity()
}

/// `Tr(op · ρ)`.
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<C64> {
    if op.dim() != state.dim() {
        return Err(invalid(format!(
            "operator dimension {} does not match state dimension {}",
            op.dim(),
            state.dim()
        )));
    }
    Ok(trace_product(op.matrix(), state.rho()))
}

pub(crate) fn trace_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for r in 0..n {
        for c in 0..n {
            acc += a[[r, c]] * b[[c, r]];
        }
    }
    acc
}

/// Single-atom mixed state `[[k, α e^{iφ}], [α e^{-iφ}, 1 - k]]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// Excited-state population.
    pub k: f64,
    /// Coherence magnitude, equal to `|⟨σ⟩|`.
    pub alpha: f64,
    /// Dipole phase in radians.
    pub phi: f64,
}

impl AtomSpec {
    pub fn new(k: f64, alpha: f64, phi: f64) -> Result<Self> {
        let spec = Self {
            k,
            alpha,
            phi: wrap_phase(phi),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { k, alpha, phi } = *self;
        if !(0.0..=1.0).contains(&k) {
            return Err(invalid(format!(
                "excitation probability {k} outside [0, 1]"
            )));
        }
        if !(alpha >= 0.0) {
            return Err(invalid(format!("coherence magnitude {alpha} is negative")));
        }
        if !phi.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        if alpha * alpha > k * (1.0 - k) + 1e-12 {
            return Err(invalid(format!(
                "alpha² = {} exceeds k(1-k) = {}; matrix not positive semidefinite",
                alpha * alpha,
                k * (1.0 - k)
            )));
        }
        Ok(())
    }

    /// The 2×2 density matrix of this atom.
    pub fn density_matrix(&self) -> Array2<C64> {
        let coherence = C64::from_polar(self.alpha, self.phi);
        // `+ 0.0` clears negative zeros so identical physical states produce
        // bit-identical matrices.
        let clean = |z: C64| C64::new(z.re + 0.0, z.im + 0.0);
        ndarray::array![
            [C64::new(self.k, 0.0), clean(coherence)],
            [clean(coherence.conj()), C64::new(1.0 - self.k, 0.0)]
        ]
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    if phi > -PI && phi <= PI {
        return phi;
    }
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// All atoms in `|g⟩`.
pub fn ground_state(register: &AtomRegister) -> QuantumState {
    let dim = register.dim();
    let mut rho = Array2::zeros((dim, dim));
    rho[[dim - 1, dim - 1]] = ONE;
    QuantumState::from_parts_unchecked(*register, rho)
}

/// State vector of the Dicke state `|N, n⟩`.
pub fn dicke_vector(register: &AtomRegister, n_excited: usize) -> Result<Array1<C64>> {
    let n = register.n_atoms();
    if n_excited > n {
        return Err(invalid(format!("cannot excite {n_excited} of {n} atoms")));
    }
    let configurations: Vec<usize> = (0..n)
        .combinations(n_excited)
        .map(|excited| {
            let ground_bits = register.dim() - 1;
            excited
                .into_iter()
                .fold(ground_bits, |idx, site| idx & !register.site_mask(site))
        })
        .collect();
    let amplitude = C64::new(1.0 / (configurations.len() as f64).sqrt(), 0.0);
    let mut psi = Array1::zeros(register.dim());
    for idx in configurations {
        psi[idx] = amplitude;
    }
    Ok(psi)
}

/// Symmetric Dicke state with `n_excited` of the register's atoms excited.
pub fn dicke_state(register: &AtomRegister, n_excited: usize) -> Result<QuantumState> {
    let psi = dicke_vector(register, n_excited)?;
    QuantumState::from_pure_vector(register, &psi)
}

/// `ρ_1 ⊗ … ⊗ ρ_N` with one [`AtomSpec`] per atom.
pub fn product_mixed_state(atoms: &[AtomSpec]) -> Result<QuantumState> {
    let register = AtomRegister::new(atoms.len())?;
    let mut rho: Array2<C64> = Array2::eye(1);
    for atom in atoms {
        atom.validate()?;
        rho = ndarray::linalg::kron(&rho, &atom.density_matrix());
    }
    QuantumState::from_density_matrix(&register, rho)
}

/// `(|eg⟩ - |ge⟩)/√2` as a vector.
pub fn singlet_vector() -> Array1<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::array![ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]
}

/// The two-atom antisymmetric (dark) state.
pub fn singlet_state() -> QuantumState {
    let register = AtomRegister::new(2).expect("two atoms");
    QuantumState::from_pure_vector(&register, &singlet_vector()).expect("normalised")
}
