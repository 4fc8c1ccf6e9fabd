use nalgebra::SVD;
use num_complex::Complex64;

use super::{unvectorize, DensityMatrix, Liouvillian, Vec16};
use crate::{Error, Result};

/// Second-smallest singular value must exceed this fraction of the largest.
pub const KERNEL_GAP: f64 = 1e-8;
/// Smallest singular value must be below this fraction of the largest.
pub const KERNEL_ZERO: f64 = 1e-10;
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Unique stationary state of `l`.
///
/// Solves `𝓛ρ = 0` with the equation for `ρ_ee,ee` replaced by `tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let m = *l.matrix();
    let mut sigma: Vec<f64> = SVD::new(m, false, false).singular_values.iter().copied().collect();
    sigma.sort_by(f64::total_cmp);
    let largest = sigma[15];
    if largest == 0.0 {
        return Err(Error::NonUniqueSteadyState {
            sigma: 0.0,
            threshold: 0.0,
        });
    }
    if sigma[1] <= KERNEL_GAP * largest {
        return Err(Error::NonUniqueSteadyState {
            sigma: sigma[1],
            threshold: KERNEL_GAP * largest,
        });
    }
    if sigma[0] > KERNEL_ZERO * largest {
        return Err(Error::Conditioning(format!(
            "generator has no numerical kernel (smallest singular value {:e}, largest {largest:e})",
            sigma[0]
        )));
    }

    let mut a = m;
    let mut b = Vec16::zeros();
    // Trace of the column-stacked matrix sits at indices 0, 5, 10, 15.
    for c in 0..16 {
        a[(0, c)] = if c % 5 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    b[0] = Complex64::new(1.0, 0.0);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Conditioning("trace-constrained system is singular".into()))?;

    let residual = (m * x).norm();
    if residual > RESIDUAL_TOLERANCE * largest {
        return Err(Error::Conditioning(format!(
            "steady-state residual {residual:e} exceeds {:e}",
            RESIDUAL_TOLERANCE * largest
        )));
    }
    let (rho, _) = DensityMatrix::project(&unvectorize(&x));
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::max_abs;
    use crate::dynamics::{evolve, PumpConfig, EG, GE, GG};
    use crate::rates::RateMatrix;

    #[test]
    fn undriven_relaxes_to_ground_state() {
        for (g, gab, gc) in [(1.0, 0.3, 0.2), (1.0, -0.57, 0.51), (2.0, 0.0, 0.0)] {
            let l = Liouvillian::build(&RateMatrix::identical(g, gab, gc).unwrap(), [0.1, 0.0], None).unwrap();
            let ss = steady_state(&l).unwrap();
            assert!(max_abs(&(ss.elements() - DensityMatrix::basis_state(GG).elements())) < 1e-10);
        }
    }

    #[test]
    fn symmetric_pump_balances_single_excitations() {
        let r = RateMatrix::identical(1.0, -6.48 / 11.38, 5.8 / 11.38).unwrap();
        let l = Liouvillian::build(&r, [0.0; 2], Some(&PumpConfig::symmetric(0.3))).unwrap();
        let ss = steady_state(&l).unwrap();
        assert!((ss.get(EG, EG) - ss.get(GE, GE)).norm() < 1e-9);
    }

    #[test]
    fn matches_long_time_integration() {
        let r = RateMatrix::identical(1.0, 0.4, -0.3).unwrap();
        let l = Liouvillian::build(&r, [0.0; 2], Some(&PumpConfig::asymmetric(0.8))).unwrap();
        let ss = steady_state(&l).unwrap();
        let tr = evolve(&l, &DensityMatrix::basis_state(EG), &[50.0]).unwrap();
        assert!(max_abs(&(tr.last().unwrap().elements() - ss.elements())) < 1e-6);
    }

    #[test]
    fn dark_state_gives_degenerate_kernel() {
        // |Γ_ab| = Γ_aa with no drive: the antisymmetric state never decays.
        let l = Liouvillian::build(&RateMatrix::identical(1.0, 1.0, 0.0).unwrap(), [0.0; 2], None).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::NonUniqueSteadyState { .. })));
        let zero = Liouvillian::build(&RateMatrix::identical(0.0, 0.0, 0.0).unwrap(), [0.0; 2], None).unwrap();
        assert!(steady_state(&zero).is_err());
    }
}
