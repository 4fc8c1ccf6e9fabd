use num_complex::Complex64;

use super::{lowering_operators, unvectorize, vectorize, Op4, Super16, Vec16};
use crate::rates::RateMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PumpRegime {
    /// `Ω_a = Ω_b`
    Symmetric,
    /// `Ω_a = −Ω_b`
    Antisymmetric,
    /// `Ω_b = 0`
    Asymmetric,
    Custom,
}

impl PumpRegime {
    pub fn name(self) -> &'static str {
        match self {
            PumpRegime::Symmetric => "symmetric",
            PumpRegime::Antisymmetric => "antisymmetric",
            PumpRegime::Asymmetric => "asymmetric",
            PumpRegime::Custom => "custom",
        }
    }
}

/// Coherent drive of each emitter, in the laser rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig {
    pub rabi_a: Complex64,
    pub rabi_b: Complex64,
    /// `Δ_α = ω_α − ω_L`.
    pub detuning_a: f64,
    pub detuning_b: f64,
    pub regime: PumpRegime,
}

impl PumpConfig {
    pub fn new(
        rabi_a: Complex64,
        rabi_b: Complex64,
        detuning_a: f64,
        detuning_b: f64,
        regime: PumpRegime,
    ) -> Result<Self> {
        let p = PumpConfig {
            rabi_a,
            rabi_b,
            detuning_a,
            detuning_b,
            regime,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_regime(regime: PumpRegime, rabi: Complex64) -> Result<Self> {
        let rabi_b = match regime {
            PumpRegime::Symmetric => rabi,
            PumpRegime::Antisymmetric => -rabi,
            PumpRegime::Asymmetric => Complex64::new(0.0, 0.0),
            PumpRegime::Custom => {
                return Err(Error::validation("custom pumping needs both Rabi frequencies"))
            }
        };
        Self::new(rabi, rabi_b, 0.0, 0.0, regime)
    }

    pub fn symmetric(rabi: f64) -> Self {
        Self::with_regime(PumpRegime::Symmetric, rabi.into()).expect("consistent by construction")
    }

    pub fn antisymmetric(rabi: f64) -> Self {
        Self::with_regime(PumpRegime::Antisymmetric, rabi.into()).expect("consistent by construction")
    }

    pub fn asymmetric(rabi: f64) -> Self {
        Self::with_regime(PumpRegime::Asymmetric, rabi.into()).expect("consistent by construction")
    }

    pub fn with_detuning(mut self, detuning_a: f64, detuning_b: f64) -> Self {
        self.detuning_a = detuning_a;
        self.detuning_b = detuning_b;
        self
    }

    fn validate(&self) -> Result<()> {
        let values = [self.rabi_a.re, self.rabi_a.im, self.rabi_b.re, self.rabi_b.im, self.detuning_a, self.detuning_b];
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("pump parameters must be finite"));
        }
        let consistent = match self.regime {
            PumpRegime::Symmetric => self.rabi_a == self.rabi_b,
            PumpRegime::Antisymmetric => self.rabi_a == -self.rabi_b,
            PumpRegime::Asymmetric => self.rabi_b == Complex64::new(0.0, 0.0),
            PumpRegime::Custom => true,
        };
        if consistent {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "pump regime {} inconsistent with Rabi frequencies {} and {}",
                self.regime.name(),
                self.rabi_a,
                self.rabi_b
            )))
        }
    }
}

/// Generator `dρ/dt = 𝓛ρ` of the two-emitter master equation.
///
/// The generator is
///
/// ```text
/// 𝓛ρ = Σ_αβ (Γ_αβ/2)(2σ_α ρ σ_β† − σ_α†σ_β ρ − ρ σ_α†σ_β)
///     + i[g_ab σ_a†σ_b + g_ba σ_b†σ_a, ρ]
///     + Σ_α (γ_α/2)(2σ_α ρ σ_α† − σ_α†σ_α ρ − ρ σ_α†σ_α)
///     − i[Σ_α Δ_α σ_α†σ_α − Σ_α (Ω_α σ_α† + Ω_α* σ_α), ρ]
/// ```
///
/// in whatever rate unit the inputs share (ℏ = 1). Note that the dephasing
/// term uses lowering operators, so it adds `γ_α` to the self decay.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: Super16,
    rates: RateMatrix,
    dephasing: [f64; 2],
    pump: Option<PumpConfig>,
}

impl Liouvillian {
    pub fn build(rates: &RateMatrix, dephasing: [f64; 2], pump: Option<&PumpConfig>) -> Result<Self> {
        if dephasing.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return Err(Error::validation("dephasing rates must be nonnegative"));
        }
        // Re-run the positivity gate: fields are public and may have been edited.
        let rates = RateMatrix::new(
            rates.gamma_aa,
            rates.gamma_bb,
            rates.gamma_ab,
            rates.gamma_ba,
            rates.g_ab,
            rates.g_ba,
        )?;
        let mut l = Liouvillian {
            matrix: Super16::zeros(),
            rates,
            dephasing,
            pump: pump.copied(),
        };
        for k in 0..16 {
            let mut basis = Op4::zeros();
            basis[(k % 4, k / 4)] = Complex64::new(1.0, 0.0);
            let column = vectorize(&l.apply_operator_form(&basis));
            l.matrix.set_column(k, &column);
        }
        Ok(l)
    }

    /// Evaluates the generator directly from operator products.
    pub fn apply_operator_form(&self, rho: &Op4) -> Op4 {
        let [sa, sb] = lowering_operators();
        let sigma = [sa, sb];
        let r = &self.rates;
        let gamma = [[r.gamma_aa, r.gamma_ab], [r.gamma_ba, r.gamma_bb]];
        let c = |x: f64| Complex64::new(x, 0.0);
        let i = Complex64::i();

        let mut out = Op4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                if gamma[a][b] == 0.0 {
                    continue;
                }
                let sab = sigma[a].adjoint() * sigma[b];
                out += (sigma[a] * rho * sigma[b].adjoint() * c(2.0) - sab * rho - rho * sab)
                    * c(gamma[a][b] / 2.0);
            }
        }
        let exchange = (sa.adjoint() * sb) * c(r.g_ab) + (sb.adjoint() * sa) * c(r.g_ba);
        out += (exchange * rho - rho * exchange) * i;

        for (a, &g) in self.dephasing.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let n = sigma[a].adjoint() * sigma[a];
            out += (sigma[a] * rho * sigma[a].adjoint() * c(2.0) - n * rho - rho * n) * c(g / 2.0);
        }

        if let Some(p) = &self.pump {
            let h = (sa.adjoint() * sa) * c(p.detuning_a) + (sb.adjoint() * sb) * c(p.detuning_b)
                - (sa.adjoint() * p.rabi_a + sa * p.rabi_a.conj())
                - (sb.adjoint() * p.rabi_b + sb * p.rabi_b.conj());
            out -= (h * rho - rho * h) * i;
        }
        out
    }

    pub fn matrix(&self) -> &Super16 {
        &self.matrix
    }

    pub fn rates(&self) -> &RateMatrix {
        &self.rates
    }

    pub fn dephasing(&self) -> [f64; 2] {
        self.dephasing
    }

    pub fn pump(&self) -> Option<&PumpConfig> {
        self.pump.as_ref()
    }

    pub fn apply(&self, rho: &Op4) -> Op4 {
        unvectorize(&(self.matrix * vectorize(rho)))
    }

    pub fn apply_vec(&self, v: &Vec16) -> Vec16 {
        self.matrix * v
    }
}
