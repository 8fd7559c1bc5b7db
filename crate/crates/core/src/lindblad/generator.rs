//! Collective-decay generator `(γ0/2)(2 J⁻ρJ⁺ - J⁺J⁻ρ - ρJ⁺J⁻)`.
//!
//! `J⁻` and `J⁺` are never multiplied densely: each is a sum of bit flips in
//! the computational basis, so applying one to a `d × d` matrix from either
//! side costs `O(N d²)` instead of `O(d³)`.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::operators::{adjoint, AtomRegister, ZERO};
use crate::state::QuantumState;

/// Precomputed site masks for applying collective ladder operators.
#[derive(Clone, Debug)]
pub struct CollectiveDecay {
    register: AtomRegister,
    masks: Vec<usize>,
    gamma0: f64,
}

#[derive(Clone, Copy)]
enum Ladder {
    Lowering,
    Raising,
}

impl CollectiveDecay {
    pub fn new(register: AtomRegister, gamma0: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(invalid(format!("gamma0 must be positive, got {gamma0}")));
        }
        let masks = (0..register.n_atoms())
            .map(|site| register.site_mask(site))
            .collect();
        Ok(Self {
            register,
            masks,
            gamma0,
        })
    }

    pub fn register(&self) -> AtomRegister {
        self.register
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// `dρ/dt` for an arbitrary square matrix of the register's dimension.
    pub fn rhs(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.register.dim();
        debug_assert_eq!(rho.dim(), (d, d));
        let mut lowered = Array2::zeros((d, d));
        let mut raised = Array2::zeros((d, d));
        // J⁻ρ and ρJ⁺
        self.apply_left(Ladder::Lowering, rho, &mut lowered);
        self.apply_right(Ladder::Raising, rho, &mut raised);

        let mut jump = Array2::zeros((d, d));
        let mut left = Array2::zeros((d, d));
        let mut right = Array2::zeros((d, d));
        // J⁻ρJ⁺, J⁺J⁻ρ, ρJ⁺J⁻
        self.apply_left(Ladder::Lowering, &raised, &mut jump);
        self.apply_left(Ladder::Raising, &lowered, &mut left);
        self.apply_right(Ladder::Lowering, &raised, &mut right);

        let half_gamma = 0.5 * self.gamma0;
        ndarray::Zip::from(&mut jump)
            .and(&left)
            .and(&right)
            .for_each(|j, &l, &r| *j = (*j * 2.0 - l - r) * half_gamma);
        jump
    }

    /// `dρ/dt` for a Hermitian `rho`, using `ρJ⁺ = (J⁻ρ)†` and
    /// `ρJ⁺J⁻ = (J⁺J⁻ρ)†` to skip both right multiplications.
    pub fn rhs_hermitian(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.register.dim();
        debug_assert_eq!(rho.dim(), (d, d));
        let mut lowered = Array2::zeros((d, d));
        let mut left = Array2::zeros((d, d));
        let mut jump = Array2::zeros((d, d));
        self.apply_left(Ladder::Lowering, rho, &mut lowered);
        self.apply_left(Ladder::Raising, &lowered, &mut left);
        let raised = adjoint(&lowered);
        self.apply_left(Ladder::Lowering, &raised, &mut jump);

        let half_gamma = 0.5 * self.gamma0;
        let l = left.as_slice().expect("standard layout");
        let out = jump.as_slice_mut().expect("standard layout");
        for r in 0..d {
            for c in 0..d {
                let idx = r * d + c;
                out[idx] = (out[idx] * 2.0 - l[idx] - l[c * d + r].conj()) * half_gamma;
            }
        }
        jump
    }

    /// `J^± · m` into `out`.
    fn apply_left(&self, which: Ladder, m: &Array2<C64>, out: &mut Array2<C64>) {
        let d = self.register.dim();
        let src = m.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        dst.fill(ZERO);
        for &mask in &self.masks {
            // rows come in blocks of `mask` with the site bit clear (excited)
            // followed by `mask` rows with it set (ground)
            for base in (0..d).step_by(2 * mask) {
                for offset in 0..mask {
                    let excited = base + offset;
                    let ground = excited + mask;
                    let (from, to) = match which {
                        // σ|e⟩ = |g⟩: row `ground` of the result picks row `excited`
                        Ladder::Lowering => (excited, ground),
                        Ladder::Raising => (ground, excited),
                    };
                    let (s, t) = (&src[from * d..from * d + d], &mut dst[to * d..to * d + d]);
                    for (t, s) in t.iter_mut().zip(s) {
                        *t += *s;
                    }
                }
            }
        }
    }

    /// `m · J^±` into `out`.
    fn apply_right(&self, which: Ladder, m: &Array2<C64>, out: &mut Array2<C64>) {
        let d = self.register.dim();
        let src = m.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        dst.fill(ZERO);
        for row in 0..d {
            let s = &src[row * d..row * d + d];
            let t = &mut dst[row * d..row * d + d];
            for &mask in &self.masks {
                for base in (0..d).step_by(2 * mask) {
                    let (excited, ground) = (base, base + mask);
                    // (m J⁺)[r, c] picks column c with site bit cleared when c
                    // has it set; (m J⁻) the reverse
                    let (from, to) = match which {
                        Ladder::Raising => (excited, ground),
                        Ladder::Lowering => (ground, excited),
                    };
                    for offset in 0..mask {
                        t[to + offset] += s[from + offset];
                    }
                }
            }
        }
    }
}

/// `dρ/dt` of the collective-decay master equation at rate `gamma0`.
pub fn lindblad_rhs(state: &QuantumState, gamma0: f64) -> Result<Array2<C64>> {
    let generator = CollectiveDecay::new(state.register(), gamma0)?;
    Ok(generator.rhs(state.rho()))
}
