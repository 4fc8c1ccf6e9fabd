use num_complex::Complex64;

use super::state::transform_raw;
use super::{BasisDirection, DensityMatrix, Op4};
use crate::rates::RateMatrix;
use crate::{Error, Result};

/// Relative mismatch of `Γ_aa` and `Γ_bb` still treated as identical.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Single-excitation elements in the `|±⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveTransient {
    pub rho_pp: f64,
    pub rho_mm: f64,
    pub rho_pm: Complex64,
}

impl CollectiveTransient {
    /// Full product-basis state (`ρ_ee = 0`, `ρ_gg` takes the rest).
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let mut c = Op4::zeros();
        c[(1, 1)] = self.rho_pp.into();
        c[(2, 2)] = self.rho_mm.into();
        c[(1, 2)] = self.rho_pm;
        c[(2, 1)] = self.rho_pm.conj();
        c[(3, 3)] = (1.0 - self.rho_pp - self.rho_mm).into();
        DensityMatrix::new(transform_raw(&c, BasisDirection::CollectiveToProduct))
    }
}

/// Closed-form decay of `ρ_++`, `ρ_−−`, `ρ_+−` starting from one excited
/// emitter (`ρ_++ = ρ_−− = ρ_+− = 1/2`), with `Γ'_aa = Γ_aa + γ`.
pub fn analytic_transient(rates: &RateMatrix, gamma: f64, t: f64) -> Result<CollectiveTransient> {
    if !rates.is_symmetric(SYMMETRY_TOLERANCE) {
        return Err(Error::validation(format!(
            "analytic transient needs gamma_aa = gamma_bb (got {:e}, {:e})",
            rates.gamma_aa, rates.gamma_bb
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::validation("dephasing rate must be nonnegative"));
    }
    let g_total = rates.gamma_aa + gamma;
    let rho_pp = 0.5 * (-(g_total + rates.gamma_ab) * t).exp();
    let rho_mm = 0.5 * (-(g_total - rates.gamma_ab) * t).exp();
    let rho_pm = 0.5 * (-Complex64::new(g_total, -2.0 * rates.g_ab) * t).exp();
    Ok(CollectiveTransient {
        rho_pp,
        rho_mm,
        rho_pm,
    })
}
