use nalgebra::Matrix3;
use num_complex::Complex64;
use std::f64::consts::PI;

use super::{GreenProvider, GreenTensor, ProjectedGreen, Site, Vec3, PROJECTION_PREFACTOR};
use crate::constants::{EPSILON_0, HBAR, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Homogeneous-space dyadic `(k₀² + ∇⊗∇) e^{ik₀R}/(4πR)` for `r_a ≠ r_b`.
pub fn free_space_tensor(r_a: &Vec3, r_b: &Vec3, omega: f64) -> Result<GreenTensor> {
    if !(omega > 0.0) {
        return Err(Error::validation(format!("omega must be positive, got {omega}")));
    }
    let sep = r_a - r_b;
    let dist = sep.norm();
    if dist == 0.0 {
        return Err(Error::Singularity);
    }
    let k = omega / SPEED_OF_LIGHT;
    let kr = k * dist;
    let i = Complex64::i();
    let scalar = Complex64::from_polar(k * k / (4.0 * PI * dist), kr);
    let transverse = 1.0 + i / kr - 1.0 / (kr * kr);
    let longitudinal = -1.0 - 3.0 * i / kr + 3.0 / (kr * kr);
    let unit = sep / dist;
    let outer = (unit * unit.transpose()).map(|x| Complex64::new(x, 0.0));
    let components = (Matrix3::identity() * transverse + outer * longitudinal) * scalar;
    Ok(GreenTensor { components, omega })
}

/// Projected free-space Green value.
///
/// With `r_a == r_b` only the finite imaginary part `k₀³/6π` per diagonal
/// component is available; this requires `coincident = true`.
pub fn free_space_projected(
    dipole: &Vec3,
    r_a: &Vec3,
    r_b: &Vec3,
    omega: f64,
    coincident: bool,
) -> Result<ProjectedGreen> {
    if !(omega > 0.0) {
        return Err(Error::validation(format!("omega must be positive, got {omega}")));
    }
    if r_a == r_b {
        if !coincident {
            return Err(Error::Singularity);
        }
        let k = omega / SPEED_OF_LIGHT;
        let im_g = k.powi(3) / (6.0 * PI);
        return Ok(ProjectedGreen::imaginary_only(
            PROJECTION_PREFACTOR * dipole.norm_squared() * im_g,
        ));
    }
    Ok(ProjectedGreen::new(free_space_tensor(r_a, r_b, omega)?.project(dipole)))
}

/// Vacuum spontaneous emission rate `ω³d²/(3πε₀ℏc³)` in rad/s.
pub fn vacuum_decay_rate(omega: f64, dipole_magnitude: f64) -> f64 {
    omega.powi(3) * dipole_magnitude.powi(2)
        / (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3))
}

/// `Γ₀` for a dipole vector.
pub fn vacuum_decay_rate_for(omega: f64, dipole: &Vec3) -> f64 {
    vacuum_decay_rate(omega, dipole.norm())
}

/// Vacuum reservoir.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl GreenProvider for FreeSpace {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        free_space_projected(d, &a.position, &b.position, omega, a.same_as(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{DEBYE, NANOMETER};

    fn omega_600nm() -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / (600.0 * NANOMETER)
    }

    /// Scalar Green function e^{ikR}/(4πR).
    fn scalar(k: f64, r: &Vec3) -> Complex64 {
        let d = r.norm();
        Complex64::from_polar(1.0 / (4.0 * PI * d), k * d)
    }

    #[test]
    fn coincident_imaginary_part_is_k_cubed_over_six_pi() {
        let omega = omega_600nm();
        let d = Vec3::new(1.0, 0.0, 0.0);
        let r = Vec3::new(0.0, 0.0, 0.0);
        let j = free_space_projected(&d, &r, &r, omega, true).unwrap();
        assert!(j.real_part().is_none());
        let im_g = j.imag_part() / PROJECTION_PREFACTOR;
        // k0 = 2π/600 nm, evaluated independently
        let k0 = 2.0 * PI / 600e-9;
        let expected = k0.powi(3) / (6.0 * PI);
        assert!((im_g / expected - 1.0).abs() < 1e-12);
        assert!((expected - 6.093e19).abs() / 6.093e19 < 1e-3);
    }

    #[test]
    fn coincident_without_flag_is_singular() {
        let r = Vec3::new(1e-9, 2e-9, 3e-9);
        let d = Vec3::new(0.0, 1.0, 0.0);
        let err = free_space_projected(&d, &r, &r, omega_600nm(), false).unwrap_err();
        assert!(matches!(err, Error::Singularity));
    }

    #[test]
    fn coincident_rate_equals_vacuum_rate() {
        let omega = omega_600nm();
        let d = Vec3::new(0.0, 0.0, 30.0 * DEBYE);
        let r = Vec3::zeros();
        let gamma = free_space_projected(&d, &r, &r, omega, true).unwrap().decay_rate();
        let gamma0 = vacuum_decay_rate(omega, 30.0 * DEBYE);
        assert!((gamma / gamma0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_matches_finite_difference_of_scalar_green() {
        let k = 2.0 * PI / 600e-9;
        let r = Vec3::new(120e-9, -80e-9, 310e-9);
        let g = free_space_tensor(&r, &Vec3::zeros(), k * SPEED_OF_LIGHT).unwrap();
        let h = 1e-11;
        let basis = [Vec3::x(), Vec3::y(), Vec3::z()];
        for i in 0..3 {
            for j in 0..3 {
                let (ei, ej) = (basis[i] * h, basis[j] * h);
                let second = (scalar(k, &(r + ei + ej)) - scalar(k, &(r + ei - ej))
                    - scalar(k, &(r - ei + ej))
                    + scalar(k, &(r - ei - ej)))
                    / (4.0 * h * h);
                let delta = if i == j { k * k } else { 0.0 };
                let expected = scalar(k, &r) * delta + second;
                let got = g.components[(i, j)];
                assert!(
                    (got - expected).norm() < 1e-5 * expected.norm().max(k * k * scalar(k, &r).norm()),
                    "({i},{j}): {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn tensor_is_reciprocal() {
        let omega = omega_600nm();
        let a = Vec3::new(1e-7, 2e-7, -3e-7);
        let b = Vec3::new(-4e-7, 0.5e-7, 6e-7);
        let gab = free_space_tensor(&a, &b, omega).unwrap();
        let gba = free_space_tensor(&b, &a, omega).unwrap();
        assert!((gab.components - gba.transpose().components).norm() < 1e-12 * gab.components.norm());
    }

    #[test]
    fn decays_at_large_separation() {
        let omega = omega_600nm();
        let d = Vec3::new(1.0, 0.0, 0.0);
        let near = free_space_projected(&d, &Vec3::zeros(), &Vec3::new(0.0, 0.0, 1e-6), omega, false)
            .unwrap()
            .value()
            .norm();
        let far = free_space_projected(&d, &Vec3::zeros(), &Vec3::new(0.0, 0.0, 1.0), omega, false)
            .unwrap()
            .value()
            .norm();
        assert!(far < near * 1e-5);
    }

    #[test]
    fn rejects_nonpositive_frequency() {
        let d = Vec3::x();
        assert!(free_space_projected(&d, &Vec3::zeros(), &Vec3::x(), 0.0, false).is_err());
    }
}
