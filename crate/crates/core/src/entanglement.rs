//! Wootters concurrence of two-qubit states.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::dynamics::{analytic_transient, DensityMatrix, Op4};
use crate::rates::RateMatrix;
use crate::{Error, Result};

/// Tolerance for round-off negative eigenvalues of `ρ`.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;
/// Samples in the coarse peak scan.
pub const PEAK_SCAN_POINTS: usize = 10_000;
/// Relative width at which the golden-section refinement stops.
pub const PEAK_TIME_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    General,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceValue {
    /// In `[0, 1]`.
    pub value: f64,
    pub method: ConcurrenceMethod,
}

impl ConcurrenceValue {
    fn new(raw: f64, method: ConcurrenceMethod) -> Self {
        ConcurrenceValue {
            value: raw.clamp(0.0, 1.0),
            method,
        }
    }
}

fn sigma_y_sigma_y() -> Op4 {
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    Matrix4::new(
        z, z, z, -one, //
        z, z, one, z, //
        z, one, z, z, //
        -one, z, z, z,
    )
}

/// `σ_y⊗σ_y ρ* σ_y⊗σ_y`.
pub fn spin_flip(rho: &Op4) -> Op4 {
    let yy = sigma_y_sigma_y();
    yy * rho.conjugate() * yy
}

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ_i` the square roots of the eigenvalues
/// of `ρρ̃` in descending order.
///
/// With `ρ = WW†` the `λ_i` are the singular values of `Wᵀ(σ_y⊗σ_y)W`, which
/// keeps small `λ_i` accurate where square roots of tiny eigenvalues would not.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<ConcurrenceValue> {
    let eig = rho.elements().symmetric_eigen();
    let mut w = eig.eigenvectors;
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam < -EIGENVALUE_CLAMP {
            return Err(Error::Numerical(format!("density matrix has eigenvalue {lam}")));
        }
        w.column_mut(i).scale_mut(lam.max(0.0).sqrt());
    }
    let tau = w.transpose() * sigma_y_sigma_y() * w;
    let mut s: Vec<f64> = tau
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD of the spin-flip overlap did not converge".into()))?
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(ConcurrenceValue::new(
        (s[0] - s[1] - s[2] - s[3]).max(0.0),
        ConcurrenceMethod::General,
    ))
}

/// `√[(ρ_++ − ρ_−−)² + 4 (Im ρ_+−)²]` on the single-excitation manifold.
pub fn concurrence_closed_form(rho_pp: f64, rho_mm: f64, rho_pm: Complex64) -> ConcurrenceValue {
    let raw = ((rho_pp - rho_mm).powi(2) + 4.0 * rho_pm.im.powi(2)).sqrt();
    ConcurrenceValue::new(raw, ConcurrenceMethod::ClosedForm)
}

/// Transient concurrence after one emitter starts excited, from the
/// collective-basis solution.
pub fn transient_concurrence(rates: &RateMatrix, gamma: f64, t: f64) -> Result<f64> {
    let c = analytic_transient(rates, gamma, t)?;
    Ok(concurrence_closed_form(c.rho_pp, c.rho_mm, c.rho_pm).value)
}

/// Same quantity written out in the rates:
/// `(e^{−Γ'_aa t}/2) √[(e^{−Γ_ab t} − e^{Γ_ab t})² + 4 sin²(2 g_ab t)]`.
pub fn transient_concurrence_explicit(rates: &RateMatrix, gamma: f64, t: f64) -> f64 {
    let g_total = rates.gamma_aa + gamma;
    let decay = (-rates.gamma_ab * t).exp() - (rates.gamma_ab * t).exp();
    let osc = (2.0 * rates.g_ab * t).sin();
    ((-g_total * t).exp() / 2.0 * (decay * decay + 4.0 * osc * osc).sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConcurrence {
    pub t_peak: f64,
    pub c_peak: f64,
    /// Concurrence vanishes identically on the scanned window.
    pub degenerate: bool,
}

/// Maximum of the transient concurrence on `(0, horizon]`: dense scan then
/// golden-section refinement around the best sample.
pub fn peak_concurrence(rates: &RateMatrix, gamma: f64, horizon: f64) -> Result<PeakConcurrence> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::validation(format!("horizon must be positive, got {horizon}")));
    }
    // Validates symmetry and gamma once up front.
    transient_concurrence(rates, gamma, horizon)?;
    let c = |t: f64| transient_concurrence(rates, gamma, t).expect("validated above");

    let n = PEAK_SCAN_POINTS;
    let step = horizon / n as f64;
    let (best, c_best) = (1..=n)
        .map(|i| (i, c(step * i as f64)))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if c_best == 0.0 {
        return Ok(PeakConcurrence {
            t_peak: 0.0,
            c_peak: 0.0,
            degenerate: true,
        });
    }

    let mut lo = step * (best - 1) as f64;
    let mut hi = (step * (best + 1) as f64).min(horizon);
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (c(x1), c(x2));
    while hi - lo > PEAK_TIME_TOLERANCE * 0.5 * (hi + lo) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = c(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = c(x1);
        }
    }
    let t_mid = 0.5 * (lo + hi);
    let candidates = [(step * best as f64, c_best), (t_mid, c(t_mid)), (x1, f1), (x2, f2)];
    let (t_peak, c_peak) = candidates
        .into_iter()
        .fold((0.0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(PeakConcurrence {
        t_peak,
        c_peak,
        degenerate: false,
    })
}
