//! Adaptive Dormand–Prince 5(4) integration of `dρ/dt = 𝓛ρ`.

use num_complex::Complex64;

use super::{unvectorize, vectorize, DensityMatrix, Liouvillian, Vec16};
use crate::entanglement::concurrence_general;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest tolerated Hermiticity/trace correction of a sampled state.
    pub max_correction: f64,
    /// Cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-9,
            atol: 1e-12,
            max_correction: 1e-8,
            max_steps: 10_000_000,
        }
    }
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest invariant correction applied to any sample.
    pub max_correction: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    /// `[ρ_ee, ρ_eg, ρ_ge, ρ_gg]` per sample.
    pub fn populations(&self) -> Vec<[f64; 4]> {
        self.states.iter().map(DensityMatrix::populations).collect()
    }

    pub fn concurrence(&self) -> Result<Vec<f64>> {
        self.states
            .iter()
            .map(|s| concurrence_general(s).map(|c| c.value))
            .collect()
    }

    /// Sample times converted to seconds, given the rate (rad/s) that
    /// defined the time unit.
    pub fn times_seconds(&self, unit_rate: f64) -> Vec<f64> {
        self.times.iter().map(|t| t / unit_rate).collect()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }
}

// Dormand–Prince tableau. The system is autonomous, so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    evolve_with(l, rho0, times, &IntegratorOptions::default())
}

/// Integrates from `t = 0` (where the state is `rho0`) and samples at
/// `times`, landing on every sample time exactly.
pub fn evolve_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if times.first().is_some_and(|t| !(*t >= 0.0)) {
        return Err(Error::validation("sample times must start at t >= 0"));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("sample times must be finite and sorted"));
    }

    let m = l.matrix();
    let f = |y: &Vec16| m * y;
    let scale = m.norm().max(f64::MIN_POSITIVE);

    let mut y = vectorize(rho0.elements());
    let mut t = 0.0;
    let mut h = 0.01 / scale;
    let mut k1 = f(&y);
    let mut out = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        max_correction: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };

    for &target in times {
        while t < target {
            if out.accepted_steps + out.rejected_steps >= opts.max_steps {
                return Err(Error::Numerical(format!("step budget exhausted at t = {t:e}")));
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if !last && (t + step == t || step < 1e-14 * t.abs().max(1.0 / scale)) {
                return Err(Error::StepUnderflow { t, h: step });
            }

            let mut k = [Vec16::zeros(); 7];
            k[0] = k1;
            for s in 1..7 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        yi += kj * Complex64::new(step * A[s][j], 0.0);
                    }
                }
                k[s] = f(&yi);
            }
            // Row 6 of A holds the fifth-order weights (FSAL).
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[6][j] != 0.0 {
                    y_new += kj * Complex64::new(step * A[6][j], 0.0);
                }
            }
            let k7 = f(&y_new);
            k[6] = k7;
            let mut err_vec = Vec16::zeros();
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err_vec += kj * Complex64::new(step * E[j], 0.0);
                }
            }
            let mut acc = 0.0;
            for i in 0..16 {
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                acc += (err_vec[i].norm() / sc).powi(2);
            }
            let err = (acc / 16.0).sqrt();

            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                out.accepted_steps += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // Don't let a short landing step shrink the working step size.
                h = if last { h.max(step * factor) } else { step * factor };
            } else {
                out.rejected_steps += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }

        let (projected, correction) = DensityMatrix::project(&unvectorize(&y));
        let (projected, clipped) = clip_negative(projected);
        let correction = correction.max(clipped);
        if correction > opts.max_correction {
            return Err(Error::IntegrationQuality {
                t,
                correction,
                limit: opts.max_correction,
            });
        }
        out.max_correction = out.max_correction.max(correction);
        out.times.push(target);
        out.states.push(DensityMatrix::new(projected).map_err(|e| {
            Error::Numerical(format!("sample at t = {target:e} left the state space: {e}"))
        })?);
    }
    Ok(out)
}

/// Zeroes slightly negative eigenvalues left by truncation error on
/// rank-deficient states.
fn clip_negative(rho: super::Op4) -> (super::Op4, f64) {
    let eig = nalgebra::SymmetricEigen::new(rho);
    if eig.eigenvalues.min() >= 0.0 {
        return (rho, 0.0);
    }
    let lambda = eig.eigenvalues.map(|x| x.max(0.0));
    let sum: f64 = lambda.sum();
    let diag = super::Op4::from_diagonal(&lambda.map(|x| Complex64::new(x / sum, 0.0)));
    let clipped = eig.eigenvectors * diag * eig.eigenvectors.adjoint();
    let change = super::max_abs(&(clipped - rho));
    (clipped, change)
}
