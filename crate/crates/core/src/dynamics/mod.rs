//! Two-emitter master equation: states, generator, time evolution and
//! steady states.
//!
//! Product basis order is fixed to `|ee⟩, |eg⟩, |ge⟩, |gg⟩`, with emitter
//! `a` as the first factor. Superoperators act on the column-stacked
//! density matrix.

mod integrate;
mod liouvillian;
mod state;
mod steady;
mod transient;

use nalgebra::{Dim, Matrix, Matrix4, RawStorage, SMatrix, SVector};
use num_complex::Complex64;

pub use integrate::{evolve, evolve_with, IntegratorOptions, Trajectory};
pub use liouvillian::{Liouvillian, PumpConfig, PumpRegime};
pub use state::{basis_transform, BasisDirection, DensityMatrix, EE, EG, GE, GG};
pub use steady::steady_state;
pub use transient::{analytic_transient, CollectiveTransient};

pub type Op4 = Matrix4<Complex64>;
pub type Super16 = SMatrix<Complex64, 16, 16>;
pub type Vec16 = SVector<Complex64, 16>;

/// Lowering operators `σ_a = σ⊗I`, `σ_b = I⊗σ` with `σ = |g⟩⟨e|`.
pub fn lowering_operators() -> [Op4; 2] {
    let one = Complex64::new(1.0, 0.0);
    let mut sa = Op4::zeros();
    sa[(2, 0)] = one; // |ee⟩ → |ge⟩
    sa[(3, 1)] = one; // |eg⟩ → |gg⟩
    let mut sb = Op4::zeros();
    sb[(1, 0)] = one; // |ee⟩ → |eg⟩
    sb[(3, 2)] = one; // |ge⟩ → |gg⟩
    [sa, sb]
}

pub(crate) fn vectorize(m: &Op4) -> Vec16 {
    Vec16::from_column_slice(m.as_slice())
}

pub(crate) fn unvectorize(v: &Vec16) -> Op4 {
    Op4::from_column_slice(v.as_slice())
}

/// Largest element modulus.
pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
