//! Classical dyadic Green functions describing the photonic reservoir.
//!
//! Every provider reduces the 3×3 dyadic to the projected scalar
//! `J = (2/ε₀ℏ) d·G(r_a, r_b, ω)·d` in rad/s, so that `Γ_ab = Im J` and
//! `g_ab = Re J / 2`.

pub(crate) mod free_space;
mod guide;
mod tabulated;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use std::ops::Add;

use crate::constants::{EPSILON_0, HBAR};
use crate::Result;

pub use free_space::{free_space_projected, free_space_tensor, vacuum_decay_rate, FreeSpace};
pub use guide::{
    FabryPerotModel, GuideGeometry, Plasmon1DModel, SlotScatterer, SlottedGuide,
    DEFAULT_END_REFLECTION, DEFAULT_SLOT_REFLECTION, DEFAULT_SLOT_TRANSMISSION,
};
pub use tabulated::{TabulatedEntry, TabulatedGreenSet};

pub type Vec3 = Vector3<f64>;

/// Prefactor `2/(ε₀ℏ)` turning `d·G·d` (C²·m⁻⁵) into a rate in rad/s.
pub const PROJECTION_PREFACTOR: f64 = 2.0 / (EPSILON_0 * HBAR);

/// A 3×3 complex dyadic value `G(r_a, r_b, ω)` in m⁻³.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTensor {
    pub components: Matrix3<Complex64>,
    pub omega: f64,
}

impl GreenTensor {
    /// `(2/ε₀ℏ) d·G·d`.
    pub fn project(&self, dipole: &Vec3) -> Complex64 {
        let d = dipole.map(|x| Complex64::new(x, 0.0));
        PROJECTION_PREFACTOR * (d.transpose() * self.components * d)[(0, 0)]
    }

    pub fn transpose(&self) -> GreenTensor {
        GreenTensor {
            components: self.components.transpose(),
            omega: self.omega,
        }
    }
}

/// Projected Green value `J` in rad/s.
///
/// At coincident points in free space the real part (vacuum Lamb shift) is
/// singular and is reported as absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedGreen {
    value: Complex64,
    real_defined: bool,
}

impl ProjectedGreen {
    pub fn new(value: Complex64) -> Self {
        ProjectedGreen {
            value,
            real_defined: true,
        }
    }

    pub fn imaginary_only(im: f64) -> Self {
        ProjectedGreen {
            value: Complex64::new(0.0, im),
            real_defined: false,
        }
    }

    /// Full value; an absent real part reads as zero.
    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn real_part(&self) -> Option<f64> {
        self.real_defined.then_some(self.value.re)
    }

    pub fn imag_part(&self) -> f64 {
        self.value.im
    }

    /// `Γ = Im J`.
    pub fn decay_rate(&self) -> f64 {
        self.value.im
    }

    /// `g = Re J / 2`, absent when the real part is.
    pub fn coherent_coupling(&self) -> Option<f64> {
        self.real_part().map(|re| re / 2.0)
    }

    pub fn scaled(self, factor: f64) -> Self {
        ProjectedGreen {
            value: self.value * factor,
            ..self
        }
    }
}

impl Add for ProjectedGreen {
    type Output = ProjectedGreen;

    fn add(self, rhs: ProjectedGreen) -> ProjectedGreen {
        ProjectedGreen {
            value: self.value + rhs.value,
            real_defined: self.real_defined && rhs.real_defined,
        }
    }
}

/// A labelled emitter location.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub label: String,
    pub position: Vec3,
}

impl Site {
    pub fn new(label: impl Into<String>, position: Vec3) -> Self {
        Site {
            label: label.into(),
            position,
        }
    }

    /// A site on the guide axis (z) at coordinate `z`.
    pub fn on_axis(label: impl Into<String>, z: f64) -> Self {
        Site::new(label, Vec3::new(0.0, 0.0, z))
    }

    pub(crate) fn same_as(&self, other: &Site) -> bool {
        self.label == other.label && self.position == other.position
    }
}

/// Evaluates the projected reservoir response between two sites.
///
/// Implementations are immutable and safe to share between threads. When
/// `site_a` and `site_b` are the same site the provider returns the
/// self-interaction term.
pub trait GreenProvider: Send + Sync {
    fn projected(
        &self,
        site_a: &Site,
        site_b: &Site,
        omega: f64,
        dipole: &Vec3,
    ) -> Result<ProjectedGreen>;
}

impl<P: GreenProvider + ?Sized> GreenProvider for Box<P> {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        (**self).projected(a, b, omega, d)
    }
}

impl<P: GreenProvider + ?Sized> GreenProvider for &P {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        (**self).projected(a, b, omega, d)
    }
}

/// Sum of a structured (scattered) provider and the vacuum term.
pub struct WithFreeSpace<P> {
    pub scattered: P,
}

impl<P: GreenProvider> GreenProvider for WithFreeSpace<P> {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        Ok(self.scattered.projected(a, b, omega, d)? + FreeSpace.projected(a, b, omega, d)?)
    }
}
