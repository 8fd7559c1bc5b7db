//! Simulation of collective spontaneous emission from ensembles of two-level
//! atoms.
//!
//! * [`operators`] and [`state`]: Kronecker-product operators, Dicke and
//!   product states on the `2^N`-dimensional atomic Hilbert space.
//! * [`dicke`]: the mean-field Dicke equation, its closed-form burst and the
//!   transition-rate ladder.
//! * [`lindblad`]: the collective-decay master equation with inversion,
//!   intensity, purity, dipole-phase and phase-dispersion observables.
//! * [`oscillator`]: the same collective coupling for harmonic oscillators,
//!   which decays without a burst.
//! * [`experiment`]: scenario configuration, sweeps and CSV output.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dicke;
pub mod error;
pub mod experiment;
pub mod lindblad;
pub mod operators;
pub mod oscillator;
pub mod state;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use operators::{AtomRegister, CollectiveKind, Operator};
pub use state::{AtomSpec, QuantumState};
