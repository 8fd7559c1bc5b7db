//! Operators on the Hilbert space of `N` two-level atoms.
//!
//! Basis convention: the local basis of every atom is `{|e⟩, |g⟩}` (index 0 is
//! the excited level) and atom 0 is the most significant factor of the
//! Kronecker product, so the global basis for two atoms reads
//! `{ee, eg, ge, gg}`. A set bit in a global index therefore marks a ground
//! state atom; site `j` owns bit `N - 1 - j`.

use std::ops::{Add, Mul, Sub};

use ndarray::{linalg::kron, Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Largest ensemble accepted unless a register is built with an explicit cap.
///
/// A density matrix at `N = 10` holds `2^20` complex entries; one integration
/// step of a dense generator costs on the order of `10^10` flops.
pub const DEFAULT_MAX_ATOMS: usize = 10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Size of an ensemble of two-level atoms, validated against a capacity cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomRegister {
    n_atoms: usize,
}

impl AtomRegister {
    pub fn new(n_atoms: usize) -> Result<Self> {
        Self::with_capacity(n_atoms, DEFAULT_MAX_ATOMS)
    }

    pub fn with_capacity(n_atoms: usize, cap: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(invalid("an ensemble needs at least one atom"));
        }
        if n_atoms > cap {
            return Err(Error::Capacity {
                requested: n_atoms,
                cap,
            });
        }
        Ok(Self { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Hilbert space dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n_atoms
    }

    /// Bit of the global basis index that belongs to `site`.
    pub fn site_mask(&self, site: usize) -> usize {
        1 << (self.n_atoms - 1 - site)
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_atoms {
            return Err(invalid(format!(
                "site {site} out of range for {} atoms",
                self.n_atoms
            )));
        }
        Ok(())
    }
}

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(invalid(format!(
                "operator matrix must be square and non-empty, got {:?}",
                matrix.dim()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Array2::eye(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: Array2::zeros((dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: adjoint(&self.matrix),
        }
    }

    pub fn dot(&self, other: &Operator) -> Self {
        Self {
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    pub fn apply(&self, vector: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(vector)
    }

    /// Largest entrywise deviation from Hermiticity, `max |A - A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Nonzero entries as `(row, col, value)` triplets, row-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        self.matrix
            .indexed_iter()
            .filter(|(_, z)| **z != ZERO)
            .map(|((r, c), z)| (r, c, *z))
            .collect()
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator {
            matrix: self.matrix.mapv(|z| z * rhs),
        }
    }
}

/// Conjugate transpose in standard (row-major) layout.
pub(crate) fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.ncols(), m.nrows()), |(r, c)| m[[c, r]].conj())
}

pub(crate) fn hermiticity_error(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[[r, c]] - m[[c, r]].conj()).norm());
        }
    }
    worst
}

/// Single-atom 2×2 matrices in the `{|e⟩, |g⟩}` basis.
pub mod local {
    use super::*;

    /// Lowering operator `|g⟩⟨e|`.
    pub fn sigma_minus() -> Array2<C64> {
        let mut m = Array2::zeros((2, 2));
        m[[1, 0]] = ONE;
        m
    }

    /// Raising operator `|e⟩⟨g|`.
    pub fn sigma_plus() -> Array2<C64> {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = ONE;
        m
    }

    /// Inversion `|e⟩⟨e| - |g⟩⟨g|`.
    pub fn sigma_z() -> Array2<C64> {
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = ONE;
        m[[1, 1]] = -ONE;
        m
    }

    /// Cosine of the two-level phase operator: off-diagonal entries 1/2.
    pub fn cos_phase() -> Array2<C64> {
        let half = C64::new(0.5, 0.0);
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = half;
        m[[1, 0]] = half;
        m
    }
}

/// Kronecker embedding `I ⊗ … ⊗ local ⊗ … ⊗ I` for sites of arbitrary local
/// dimension. Atom registers go through [`embed_single_site`].
pub fn embed_local(local: &Array2<C64>, site: usize, n_sites: usize) -> Result<Operator> {
    let d = local.nrows();
    if local.ncols() != d || d == 0 {
        return Err(invalid("local operator must be square"));
    }
    if site >= n_sites {
        return Err(invalid(format!(
            "site {site} out of range for {n_sites} sites"
        )));
    }
    let left: Array2<C64> = Array2::eye(d.pow(site as u32));
    let right: Array2<C64> = Array2::eye(d.pow((n_sites - site - 1) as u32));
    Operator::from_matrix(kron(&kron(&left, local), &right))
}

/// Embeds a 2×2 single-atom operator at `site` of the register.
pub fn embed_single_site(
    local_op: &Array2<C64>,
    site: usize,
    register: &AtomRegister,
) -> Result<Operator> {
    if local_op.dim() != (2, 2) {
        return Err(invalid(format!(
            "single-atom operator must be 2x2, got {:?}",
            local_op.dim()
        )));
    }
    register.check_site(site)?;
    embed_local(local_op, site, register.n_atoms())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollectiveKind {
    /// `J⁻ = Σ_j σ_j`
    Lowering,
    /// `J⁺ = Σ_j σ_j⁺`
    Raising,
    /// `J^z = Σ_j σ_j^z`
    Inversion,
}

pub fn collective_operator(kind: CollectiveKind, register: &AtomRegister) -> Result<Operator> {
    let local = match kind {
        CollectiveKind::Lowering => local::sigma_minus(),
        CollectiveKind::Raising => local::sigma_plus(),
        CollectiveKind::Inversion => local::sigma_z(),
    };
    let mut total = Operator::zeros(register.dim());
    for site in 0..register.n_atoms() {
        total.matrix += embed_single_site(&local, site, register)?.matrix();
    }
    Ok(total)
}

/// `exp(iΦ)` of an `M`-level system: the cyclic shift
/// `Σ_{m=0}^{M-2} |m⟩⟨m+1| + |M-1⟩⟨0|`.
///
/// Only exposed for inspection. For `M = 2` the wraparound term makes this the
/// full flip matrix, whereas the two-level cosine operator used for dynamics
/// has off-diagonal entries 1/2 (see [`local::cos_phase`]).
pub fn phase_exponential_operator(levels: usize) -> Result<Operator> {
    if levels < 2 {
        return Err(invalid(format!(
            "phase operator needs M >= 2, got {levels}"
        )));
    }
    let mut m = Array2::zeros((levels, levels));
    for row in 0..levels - 1 {
        m[[row, row + 1]] = ONE;
    }
    m[[levels - 1, 0]] = ONE;
    Operator::from_matrix(m)
}

/// `cos Φ_i`: the two-level cosine-phase matrix embedded at `site`.
pub fn cos_phase_operator(site: usize, register: &AtomRegister) -> Result<Operator> {
    embed_single_site(&local::cos_phase(), site, register)
}
