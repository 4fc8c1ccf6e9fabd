use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::max_abs;
use super::Op4;
use crate::{Error, Result};

pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Validated two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Op4);

impl DensityMatrix {
    pub fn new(elements: Op4) -> Result<Self> {
        let herm = max_abs(&(elements - elements.adjoint()));
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::validation(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = elements.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::validation(format!("density matrix trace {tr} differs from 1")));
        }
        let min_eig = SymmetricEigen::new((elements + elements.adjoint()) * Complex64::new(0.5, 0.0))
            .eigenvalues
            .min();
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::validation(format!(
                "density matrix not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix(elements))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::validation("zero state vector"));
        }
        let v = v / Complex64::new(norm, 0.0);
        Self::new(v * v.adjoint())
    }

    /// Projector onto a product basis state (`EE`, `EG`, `GE`, `GG`).
    pub fn basis_state(index: usize) -> Self {
        let mut m = Op4::zeros();
        m[(index, index)] = Complex64::new(1.0, 0.0);
        DensityMatrix(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Op4::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn elements(&self) -> &Op4 {
        &self.0
    }

    pub fn into_inner(self) -> Op4 {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Diagonal `[ρ_ee, ρ_eg, ρ_ge, ρ_gg]`.
    pub fn populations(&self) -> [f64; 4] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re, self.0[(3, 3)].re]
    }

    /// Hermitian part rescaled to unit trace, plus the largest element
    /// change this caused.
    pub fn project(raw: &Op4) -> (Op4, f64) {
        let herm = (raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        let projected = herm / herm.trace();
        (projected, max_abs(&(projected - raw)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    /// Product basis → `|3⟩ = |ee⟩, |+⟩, |−⟩, |0⟩ = |gg⟩`.
    ProductToCollective,
    CollectiveToProduct,
}

/// Rows are the collective states in product coordinates.
fn collective_unitary() -> Op4 {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    Op4::new(
        one, z, z, z, //
        z, s, s, z, //
        z, s, -s, z, //
        z, z, z, one,
    )
}

/// Unitary change between the product and symmetric/antisymmetric bases.
pub fn basis_transform(rho: &DensityMatrix, direction: BasisDirection) -> DensityMatrix {
    DensityMatrix(transform_raw(rho.elements(), direction))
}

pub(crate) fn transform_raw(m: &Op4, direction: BasisDirection) -> Op4 {
    let u = collective_unitary();
    match direction {
        BasisDirection::ProductToCollective => u * m * u.adjoint(),
        BasisDirection::CollectiveToProduct => u.adjoint() * m * u,
    }
}
