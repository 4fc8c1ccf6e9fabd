//! Dissipative and coherent couplings of an emitter pair.

mod units;

use crate::greens::{free_space::vacuum_decay_rate_for, GreenProvider, ProjectedGreen, Site, Vec3, WithFreeSpace};
use crate::{Error, Result};

pub use units::{convert, Unit};

/// Absolute slack on `|Γ_ab| ≤ √(Γ_aa Γ_bb)`, in units of `Γ_aa`.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;
/// Relative tolerance on reciprocity of the cross terms.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-9;

/// Two identical two-level emitters.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPair {
    pub omega_a: f64,
    pub omega_b: f64,
    /// Transition dipole moment, C·m.
    pub dipole: Vec3,
    pub site_a: Site,
    pub site_b: Site,
    /// Phenomenological dephasing rates `γ_a`, `γ_b`, rad/s.
    pub dephasing: [f64; 2],
}

impl QubitPair {
    pub fn new(omega: f64, dipole: Vec3, site_a: Site, site_b: Site) -> Result<Self> {
        let pair = QubitPair {
            omega_a: omega,
            omega_b: omega,
            dipole,
            site_a,
            site_b,
            dephasing: [0.0, 0.0],
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_dephasing(mut self, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        self.dephasing = [gamma_a, gamma_b];
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > 0.0 && self.omega_b > 0.0) {
            return Err(Error::validation("transition frequencies must be positive"));
        }
        if !(self.dipole.norm() > 0.0) {
            return Err(Error::validation("dipole moment must be nonzero"));
        }
        if self.dephasing.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::validation("dephasing rates must be nonnegative"));
        }
        if self.site_a.label == self.site_b.label {
            return Err(Error::validation("the two emitters need distinct site labels"));
        }
        Ok(())
    }

    /// Vacuum rate `Γ₀` for this pair's dipole and frequency.
    pub fn vacuum_rate(&self) -> f64 {
        vacuum_decay_rate_for(self.omega_a, &self.dipole)
    }
}

/// `{Γ_aa, Γ_bb, Γ_ab, Γ_ba, g_ab, g_ba}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMatrix {
    pub gamma_aa: f64,
    pub gamma_bb: f64,
    pub gamma_ab: f64,
    pub gamma_ba: f64,
    pub g_ab: f64,
    pub g_ba: f64,
}

impl RateMatrix {
    /// Validated constructor: nonnegative self rates, reciprocal cross
    /// terms and a positive semidefinite decay matrix.
    pub fn new(
        gamma_aa: f64,
        gamma_bb: f64,
        gamma_ab: f64,
        gamma_ba: f64,
        g_ab: f64,
        g_ba: f64,
    ) -> Result<Self> {
        let all = [gamma_aa, gamma_bb, gamma_ab, gamma_ba, g_ab, g_ba];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation(format!("non-finite rate in {all:?}")));
        }
        if gamma_aa < 0.0 || gamma_bb < 0.0 {
            return Err(Error::validation(format!(
                "self decay rates must be nonnegative (gamma_aa = {gamma_aa:e}, gamma_bb = {gamma_bb:e})"
            )));
        }
        let scale = gamma_aa.max(gamma_bb).max(f64::MIN_POSITIVE);
        if (gamma_ab - gamma_ba).abs() > RECIPROCITY_TOLERANCE * scale
            || (g_ab - g_ba).abs() > RECIPROCITY_TOLERANCE * scale.max(g_ab.abs())
        {
            return Err(Error::validation(format!(
                "non-reciprocal couplings: gamma_ab = {gamma_ab:e}, gamma_ba = {gamma_ba:e}, g_ab = {g_ab:e}, g_ba = {g_ba:e}"
            )));
        }
        let bound = (gamma_aa * gamma_bb).sqrt();
        if gamma_ab.abs().max(gamma_ba.abs()) > bound + POSITIVITY_TOLERANCE * gamma_aa {
            return Err(Error::Positivity {
                gamma_aa,
                gamma_bb,
                gamma_ab,
                bound,
            });
        }
        Ok(RateMatrix {
            gamma_aa,
            gamma_bb,
            gamma_ab,
            gamma_ba,
            g_ab,
            g_ba,
        })
    }

    /// Reciprocal pair with `Γ_ab = Γ_ba`, `g_ab = g_ba`.
    pub fn symmetric(gamma_aa: f64, gamma_bb: f64, gamma_ab: f64, g_ab: f64) -> Result<Self> {
        Self::new(gamma_aa, gamma_bb, gamma_ab, gamma_ab, g_ab, g_ab)
    }

    /// Identical emitters: `Γ_bb = Γ_aa`.
    pub fn identical(gamma_aa: f64, gamma_ab: f64, g_ab: f64) -> Result<Self> {
        Self::symmetric(gamma_aa, gamma_aa, gamma_ab, g_ab)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.gamma_aa * factor,
            self.gamma_bb * factor,
            self.gamma_ab * factor,
            self.gamma_ba * factor,
            self.g_ab * factor,
            self.g_ba * factor,
        )
    }

    /// Whether both emitters see the same self rate (relative `tol`).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.gamma_aa - self.gamma_bb).abs() <= tol * self.gamma_aa.max(self.gamma_bb)
    }

    /// The 2×2 decay matrix `[[Γ_aa, Γ_ab], [Γ_ba, Γ_bb]]`.
    pub fn decay_matrix(&self) -> [[f64; 2]; 2] {
        [[self.gamma_aa, self.gamma_ab], [self.gamma_ba, self.gamma_bb]]
    }
}

/// Evaluates the provider at the emitter frequency and forms the rates.
///
/// `Γ_αβ = Im J(α, β)` and `g_ab = Re J(a, b)/2`; the self coherent terms
/// (Lamb shifts) are discarded.
pub fn compute_rates<P: GreenProvider + ?Sized>(
    pair: &QubitPair,
    provider: &P,
    include_free_space: bool,
) -> Result<RateMatrix> {
    pair.validate()?;
    if pair.omega_a != pair.omega_b {
        return Err(Error::validation(format!(
            "emitters must be identical: omega_a = {:e}, omega_b = {:e}",
            pair.omega_a, pair.omega_b
        )));
    }
    let omega = pair.omega_a;
    let (a, b, d) = (&pair.site_a, &pair.site_b, &pair.dipole);
    let eval = |x: &Site, y: &Site| -> Result<ProjectedGreen> {
        if include_free_space {
            WithFreeSpace { scattered: provider }.projected(x, y, omega, d)
        } else {
            provider.projected(x, y, omega, d)
        }
    };
    let j_aa = eval(a, a)?;
    let j_bb = eval(b, b)?;
    let j_ab = eval(a, b)?;
    let j_ba = eval(b, a)?;
    let coherent = |j: &ProjectedGreen| {
        j.coherent_coupling()
            .ok_or_else(|| Error::Numerical("cross term has no finite real part".into()))
    };
    RateMatrix::new(
        j_aa.decay_rate(),
        j_bb.decay_rate(),
        j_ab.decay_rate(),
        j_ba.decay_rate(),
        coherent(&j_ab)?,
        coherent(&j_ba)?,
    )
}

/// All rates divided by the vacuum rate `Γ₀` of the pair.
pub fn normalized_rates(rates: &RateMatrix, pair: &QubitPair) -> Result<RateMatrix> {
    rates.scaled(1.0 / pair.vacuum_rate())
}
