//! Shared helpers for unit tests.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;

use crate::dynamics::DensityMatrix;

/// Random full-rank state `A A† / tr(A A†)`.
pub fn random_state(rng: &mut impl Rng) -> DensityMatrix {
    let mut a = Matrix4::<Complex64>::zeros();
    for x in a.iter_mut() {
        *x = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let (m, _) = DensityMatrix::project(&(a * a.adjoint()));
    DensityMatrix::new(m).unwrap()
}

/// Random Hermitian unit-trace matrix (not necessarily positive).
pub fn random_hermitian(rng: &mut impl Rng) -> Matrix4<Complex64> {
    let mut a = Matrix4::<Complex64>::zeros();
    for x in a.iter_mut() {
        *x = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = h.trace().re;
    h + Matrix4::identity() * Complex64::new((1.0 - tr) / 4.0, 0.0)
}
