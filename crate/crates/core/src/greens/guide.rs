//! Effective single-mode models of a plasmonic waveguide along the z axis.
//!
//! The guide contributes the scattered part `J_sc = i Γ_pl u(z_a, z_b)`
//! where `u` is the 1D propagator of a guided mode with complex wavenumber
//! `k = 2π/λ_spp + i/(2l)` (`l` is the intensity propagation length, so the
//! field amplitude decays over `2l`).

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{GreenProvider, ProjectedGreen, Site, Vec3};
use crate::{Error, Result};

/// End reflection used when none is configured: `0.6 e^{iπ}`.
pub const DEFAULT_END_REFLECTION: Complex64 = Complex64::new(-0.6, 0.0);
pub const DEFAULT_SLOT_REFLECTION: Complex64 = Complex64::new(0.0, 0.3);
pub const DEFAULT_SLOT_TRANSMISSION: Complex64 = Complex64::new(0.9, 0.0);

/// Relative size of the next round-trip group at which the image series stops.
const IMAGE_SERIES_TOLERANCE: f64 = 1e-12;
const IMAGE_SERIES_MAX_TERMS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plasmon1DModel {
    /// Guided-mode wavelength, m.
    pub lambda_spp: f64,
    /// Intensity propagation length, m. `f64::INFINITY` means lossless.
    pub prop_length: f64,
    /// On-site decay rate into the guided mode, rad/s.
    pub gamma_pl: f64,
    /// Dipole magnitude (C·m) that `gamma_pl` refers to. When set, the
    /// projected value scales as `|d|²/d_ref²`; when unset it is used as-is.
    pub reference_dipole: Option<f64>,
    /// z coordinate of the guide origin.
    pub axis_origin: f64,
}

impl Plasmon1DModel {
    pub fn new(lambda_spp: f64, prop_length: f64, gamma_pl: f64) -> Result<Self> {
        if !(lambda_spp > 0.0 && lambda_spp.is_finite()) {
            return Err(Error::validation(format!("lambda_spp must be positive, got {lambda_spp}")));
        }
        if !(prop_length > 0.0) {
            return Err(Error::validation(format!(
                "propagation length must be positive, got {prop_length}"
            )));
        }
        if !(gamma_pl >= 0.0 && gamma_pl.is_finite()) {
            return Err(Error::validation(format!("gamma_pl must be nonnegative, got {gamma_pl}")));
        }
        Ok(Plasmon1DModel {
            lambda_spp,
            prop_length,
            gamma_pl,
            reference_dipole: None,
            axis_origin: 0.0,
        })
    }

    pub fn with_axis_origin(mut self, origin: f64) -> Self {
        self.axis_origin = origin;
        self
    }

    pub fn with_reference_dipole(mut self, dipole: f64) -> Result<Self> {
        if !(dipole > 0.0) {
            return Err(Error::validation("reference dipole must be positive"));
        }
        self.reference_dipole = Some(dipole);
        Ok(self)
    }

    /// `2π/λ_spp + i/(2l)`.
    pub fn wavenumber(&self) -> Complex64 {
        Complex64::new(2.0 * PI / self.lambda_spp, 0.5 / self.prop_length)
    }

    pub fn k_spp(&self) -> f64 {
        2.0 * PI / self.lambda_spp
    }

    /// Scattered-only value for an infinite guide.
    pub fn infinite_guide_projected(&self, z_a: f64, z_b: f64) -> ProjectedGreen {
        let phase = Complex64::i() * self.wavenumber() * (z_a - z_b).abs();
        ProjectedGreen::new(Complex64::i() * self.gamma_pl * phase.exp())
    }

    fn dipole_scale(&self, dipole: &Vec3) -> f64 {
        match self.reference_dipole {
            Some(d_ref) => dipole.norm_squared() / (d_ref * d_ref),
            None => 1.0,
        }
    }

    fn axial(&self, site: &Site) -> f64 {
        site.position.z - self.axis_origin
    }
}

impl GreenProvider for Plasmon1DModel {
    fn projected(&self, a: &Site, b: &Site, _omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        Ok(self
            .infinite_guide_projected(self.axial(a), self.axial(b))
            .scaled(self.dipole_scale(d)))
    }
}

/// Finite guide on `[0, L]` with identical partially reflecting ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabryPerotModel {
    pub base: Plasmon1DModel,
    pub length: f64,
    pub r_end: Complex64,
}

impl FabryPerotModel {
    pub fn new(base: Plasmon1DModel, length: f64, r_end: Complex64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::validation(format!("guide length must be positive, got {length}")));
        }
        if r_end.norm() > 1.0 {
            return Err(Error::validation(format!("|r_end| = {} exceeds 1", r_end.norm())));
        }
        if r_end.norm() == 1.0 && base.prop_length.is_infinite() {
            return Err(Error::validation(
                "lossless guide with |r_end| = 1 has no convergent image series",
            ));
        }
        Ok(FabryPerotModel {
            base,
            length,
            r_end,
        })
    }

    fn check_domain(&self, z: f64) -> Result<()> {
        if (0.0..=self.length).contains(&z) {
            Ok(())
        } else {
            Err(Error::Domain {
                position: z,
                length: self.length,
            })
        }
    }

    /// Multiple-reflection image sum for the scattered guide term.
    ///
    /// Each round trip contributes four paths (direct, left bounce, right
    /// bounce, both) weighted by `(r² e^{2ikL})ⁿ`.
    pub fn finite_guide_projected(&self, z_a: f64, z_b: f64) -> Result<ProjectedGreen> {
        self.check_domain(z_a)?;
        self.check_domain(z_b)?;
        let k = self.base.wavenumber();
        let i = Complex64::i();
        let r = self.r_end;
        let len = self.length;
        let path = |x: f64| (i * k * x).exp();
        let dz = (z_a - z_b).abs();
        let group = path(dz)
            + r * path(z_a + z_b)
            + r * path(2.0 * len - z_a - z_b)
            + r * r * path(2.0 * len - dz);
        let round_trip = r * r * path(2.0 * len);

        // Geometric tail bound of the remaining round trips.
        let tail = 1.0 / (1.0 - round_trip.norm());
        let mut sum = group;
        let mut term = group;
        let mut n = 0;
        loop {
            term *= round_trip;
            if term.norm() * tail < IMAGE_SERIES_TOLERANCE * sum.norm() || term.norm() == 0.0 {
                break;
            }
            sum += term;
            n += 1;
            if n > IMAGE_SERIES_MAX_TERMS {
                return Err(Error::Numerical(format!(
                    "image series did not converge after {IMAGE_SERIES_MAX_TERMS} round trips"
                )));
            }
        }
        Ok(ProjectedGreen::new(i * self.base.gamma_pl * sum))
    }
}

impl GreenProvider for FabryPerotModel {
    fn projected(&self, a: &Site, b: &Site, _omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        Ok(self
            .finite_guide_projected(self.base.axial(a), self.base.axial(b))?
            .scaled(self.base.dipole_scale(d)))
    }
}

/// Point-like two-port discontinuity on the guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotScatterer {
    /// Guide coordinate, m.
    pub position: f64,
    pub r: Complex64,
    pub t: Complex64,
}

impl SlotScatterer {
    pub fn new(position: f64, r: Complex64, t: Complex64) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::validation("slot position must be finite"));
        }
        // Symmetric two-port: the scattering matrix has eigenvalues r ± t.
        let gain = (r + t).norm().max((r - t).norm());
        if gain > 1.0 + 1e-12 {
            return Err(Error::validation(format!(
                "slot at {position} m is not passive: max(|r + t|, |r - t|) = {gain}"
            )));
        }
        if t.norm() == 0.0 {
            return Err(Error::validation("slot transmission must be nonzero"));
        }
        Ok(SlotScatterer { position, r, t })
    }

    pub fn with_defaults(position: f64) -> Result<Self> {
        Self::new(position, DEFAULT_SLOT_REFLECTION, DEFAULT_SLOT_TRANSMISSION)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuideGeometry {
    Infinite(Plasmon1DModel),
    Finite(FabryPerotModel),
}

impl GuideGeometry {
    pub fn base(&self) -> &Plasmon1DModel {
        match self {
            GuideGeometry::Infinite(m) => m,
            GuideGeometry::Finite(fp) => &fp.base,
        }
    }

    /// Slot-free scattered value.
    pub fn projected_unslotted(&self, z_a: f64, z_b: f64) -> Result<ProjectedGreen> {
        match self {
            GuideGeometry::Infinite(m) => Ok(m.infinite_guide_projected(z_a, z_b)),
            GuideGeometry::Finite(fp) => fp.finite_guide_projected(z_a, z_b),
        }
    }
}

impl GreenProvider for GuideGeometry {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        match self {
            GuideGeometry::Infinite(m) => m.projected(a, b, omega, d),
            GuideGeometry::Finite(fp) => fp.projected(a, b, omega, d),
        }
    }
}

/// Guide with slot scatterers, solved with 2×2 transfer matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SlottedGuide {
    pub geometry: GuideGeometry,
    slots: Vec<SlotScatterer>,
}

/// Amplitudes of right- and left-going waves at a point, `u = a + b`.
#[derive(Debug, Clone, Copy)]
struct Waves {
    right: Complex64,
    left: Complex64,
}

impl Waves {
    fn propagate(self, phase: Complex64) -> Waves {
        Waves {
            right: self.right * phase,
            left: self.left / phase,
        }
    }

    /// Crossing a slot from left to right.
    fn through_slot(self, slot: &SlotScatterer) -> Waves {
        let (r, t) = (slot.r, slot.t);
        Waves {
            right: ((t * t - r * r) * self.right + r * self.left) / t,
            left: (self.left - r * self.right) / t,
        }
    }

    fn field(self) -> Complex64 {
        self.right + self.left
    }
}

/// Waves as `b0 · homogeneous + driven`, with `b0` the unknown left-going
/// amplitude at the left boundary.
#[derive(Debug, Clone, Copy)]
struct AffineWaves {
    homogeneous: Waves,
    driven: Waves,
}

impl AffineWaves {
    fn map(self, f: impl Fn(Waves) -> Waves) -> Self {
        AffineWaves {
            homogeneous: f(self.homogeneous),
            driven: f(self.driven),
        }
    }
}

enum Event<'a> {
    Slot(&'a SlotScatterer),
    Source,
    Observer,
}

impl SlottedGuide {
    pub fn new(geometry: GuideGeometry, mut slots: Vec<SlotScatterer>) -> Result<Self> {
        slots.sort_by(|a, b| a.position.total_cmp(&b.position));
        for pair in slots.windows(2) {
            if pair[0].position == pair[1].position {
                return Err(Error::Configuration(format!(
                    "two slots at the same position {} m",
                    pair[0].position
                )));
            }
        }
        if let GuideGeometry::Finite(fp) = &geometry {
            for s in &slots {
                if !(s.position > 0.0 && s.position < fp.length) {
                    return Err(Error::Configuration(format!(
                        "slot at {} m outside guide interior (0, {})",
                        s.position, fp.length
                    )));
                }
            }
        }
        Ok(SlottedGuide { geometry, slots })
    }

    pub fn slots(&self) -> &[SlotScatterer] {
        &self.slots
    }

    /// Scattered value from a source at `z_b` observed at `z_a`, including
    /// all multiple scattering among slots and (finite guides) ends.
    pub fn slotted_guide_projected(&self, z_a: f64, z_b: f64) -> Result<ProjectedGreen> {
        let base = self.geometry.base();
        let (left_edge, right_edge, r_end) = match &self.geometry {
            GuideGeometry::Finite(fp) => {
                fp.check_domain(z_a)?;
                fp.check_domain(z_b)?;
                (0.0, fp.length, fp.r_end)
            }
            GuideGeometry::Infinite(_) => {
                let lo = self.slots.iter().map(|s| s.position).fold(z_a.min(z_b), f64::min);
                let hi = self.slots.iter().map(|s| s.position).fold(z_a.max(z_b), f64::max);
                (lo, hi, Complex64::new(0.0, 0.0))
            }
        };
        if self.slots.iter().any(|s| s.position == z_a || s.position == z_b) {
            return Err(Error::Configuration(format!(
                "emitter coincides with a slot (z_a = {z_a} m, z_b = {z_b} m)"
            )));
        }

        let mut events: Vec<(f64, Event)> = self
            .slots
            .iter()
            .map(|s| (s.position, Event::Slot(s)))
            .collect();
        events.push((z_b, Event::Source));
        events.push((z_a, Event::Observer));
        // Field is continuous across the source, so their relative order at
        // equal positions is irrelevant.
        events.sort_by(|a, b| a.0.total_cmp(&b.0));

        let k = base.wavenumber();
        let i = Complex64::i();
        // Left boundary: outgoing right-going wave = r_end × incident left-going.
        let mut state = AffineWaves {
            homogeneous: Waves {
                right: r_end,
                left: Complex64::new(1.0, 0.0),
            },
            driven: Waves {
                right: Complex64::new(0.0, 0.0),
                left: Complex64::new(0.0, 0.0),
            },
        };
        let mut z = left_edge;
        let mut observed = None;
        for (pos, event) in &events {
            let phase = (i * k * (pos - z)).exp();
            state = state.map(|w| w.propagate(phase));
            z = *pos;
            match event {
                Event::Slot(slot) => state = state.map(|w| w.through_slot(slot)),
                Event::Source => {
                    state.driven.right += 1.0;
                    state.driven.left -= 1.0;
                }
                Event::Observer => observed = Some(state),
            }
        }
        let phase = (i * k * (right_edge - z)).exp();
        state = state.map(|w| w.propagate(phase));

        // Right boundary: left-going = r_end × right-going.
        let denom = state.homogeneous.left - r_end * state.homogeneous.right;
        if denom.norm() == 0.0 {
            return Err(Error::Numerical("guide resonance has no finite response".into()));
        }
        let b0 = -(state.driven.left - r_end * state.driven.right) / denom;
        let obs = observed.expect("observer event is always present");
        let u = b0 * obs.homogeneous.field() + obs.driven.field();
        Ok(ProjectedGreen::new(i * base.gamma_pl * u))
    }
}

impl GreenProvider for SlottedGuide {
    fn projected(&self, a: &Site, b: &Site, _omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        let base = self.geometry.base();
        Ok(self
            .slotted_guide_projected(base.axial(a), base.axial(b))?
            .scaled(base.dipole_scale(d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{MICROMETER, NANOMETER};

    const LAMBDA: f64 = 425.0 * NANOMETER;

    fn wire() -> Plasmon1DModel {
        Plasmon1DModel::new(LAMBDA, 1.7 * MICROMETER, 1.0).unwrap()
    }

    fn lossless() -> Plasmon1DModel {
        Plasmon1DModel::new(LAMBDA, f64::INFINITY, 1.0).unwrap()
    }

    /// Closed-form Fabry–Pérot propagator, independent of the image loop.
    fn fabry_perot_closed(fp: &FabryPerotModel, za: f64, zb: f64) -> Complex64 {
        let k = fp.base.wavenumber();
        let i = Complex64::i();
        let (r, l) = (fp.r_end, fp.length);
        let p = |x: f64| (i * k * x).exp();
        let dz = (za - zb).abs();
        let num = p(dz) + r * p(za + zb) + r * p(2.0 * l - za - zb) + r * r * p(2.0 * l - dz);
        i * fp.base.gamma_pl * num / (1.0 - r * r * p(2.0 * l))
    }

    #[test]
    fn infinite_guide_coincident_and_quarter_wave() {
        let j = lossless().infinite_guide_projected(0.0, 0.0);
        assert_eq!(j.decay_rate(), 1.0);
        assert_eq!(j.coherent_coupling(), Some(0.0));

        let j = lossless().infinite_guide_projected(0.0, LAMBDA / 4.0);
        assert!(j.decay_rate().abs() < 1e-15);
        assert!((j.coherent_coupling().unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn infinite_guide_closed_form_rates() {
        let m = wire();
        for &dz in &[0.1e-7, 1.3e-7, 4.4e-7, 9e-7] {
            let j = m.infinite_guide_projected(0.0, dz);
            let att = (-dz / (2.0 * m.prop_length)).exp();
            assert!((j.decay_rate() - att * (m.k_spp() * dz).cos()).abs() < 1e-14);
            assert!((j.coherent_coupling().unwrap() + 0.5 * att * (m.k_spp() * dz).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_zeros_are_g_extrema() {
        let m = lossless();
        for n in 0..3 {
            let dz = (PI / 2.0 + n as f64 * PI) / m.k_spp();
            let j = m.infinite_guide_projected(0.0, dz);
            assert!(j.decay_rate().abs() < 1e-12);
            assert!((j.coherent_coupling().unwrap().abs() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn fabry_perot_without_reflection_is_infinite_guide() {
        let fp = FabryPerotModel::new(wire(), 1.5 * LAMBDA, Complex64::new(0.0, 0.0)).unwrap();
        for &(a, b) in &[(0.0, 1.5 * LAMBDA), (0.1e-7, 3e-7), (2e-7, 2e-7)] {
            assert_eq!(
                fp.finite_guide_projected(a, b).unwrap().value(),
                wire().infinite_guide_projected(a, b).value()
            );
        }
    }

    #[test]
    fn image_series_matches_closed_form() {
        for r in [Complex64::new(-0.6, 0.0), Complex64::from_polar(0.95, 0.4), Complex64::new(0.999, 0.0)] {
            for base in [wire(), lossless()] {
                let fp = FabryPerotModel::new(base, 1.5 * LAMBDA, r).unwrap();
                for &(a, b) in &[(0.0, 1.5 * LAMBDA), (0.3e-7, 5e-7), (2e-7, 2e-7)] {
                    let got = fp.finite_guide_projected(a, b).unwrap().value();
                    let want = fabry_perot_closed(&fp, a, b);
                    assert!((got - want).norm() < 1e-9 * want.norm(), "{r} {a} {b}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn fabry_perot_rejects_out_of_domain() {
        let fp = FabryPerotModel::new(wire(), LAMBDA, DEFAULT_END_REFLECTION).unwrap();
        assert!(matches!(fp.finite_guide_projected(-1e-9, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(fp.finite_guide_projected(0.0, 2.0 * LAMBDA), Err(Error::Domain { .. })));
    }

    #[test]
    fn fabry_perot_rejects_lossless_perfect_mirrors() {
        assert!(FabryPerotModel::new(lossless(), LAMBDA, Complex64::new(1.0, 0.0)).is_err());
        assert!(FabryPerotModel::new(wire(), LAMBDA, Complex64::new(1.0, 0.0)).is_ok());
        assert!(FabryPerotModel::new(wire(), LAMBDA, Complex64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn end_resonance_beats_infinite_guide() {
        let l = 1.5 * LAMBDA;
        let fp = FabryPerotModel::new(wire(), l, Complex64::new(0.95, 0.0)).unwrap();
        let finite = fp.finite_guide_projected(0.0, l).unwrap().decay_rate().abs();
        let infinite = wire().infinite_guide_projected(0.0, l).decay_rate().abs();
        assert!(finite > infinite, "{finite} <= {infinite}");
    }

    #[test]
    fn slot_free_transfer_matrix_matches_analytic_models() {
        let inf = SlottedGuide::new(GuideGeometry::Infinite(wire()), vec![]).unwrap();
        let fp = FabryPerotModel::new(wire(), 2.0 * LAMBDA, DEFAULT_END_REFLECTION).unwrap();
        let fin = SlottedGuide::new(GuideGeometry::Finite(fp), vec![]).unwrap();
        for &(a, b) in &[(0.25 * LAMBDA, 1.75 * LAMBDA), (0.0, 0.0), (1e-7, 0.5e-7)] {
            let got = inf.slotted_guide_projected(a, b).unwrap().value();
            let want = wire().infinite_guide_projected(a, b).value();
            assert!((got - want).norm() < 1e-12 * want.norm());
            let got = fin.slotted_guide_projected(a, b).unwrap().value();
            let want = fabry_perot_closed(&fp, a, b);
            assert!((got - want).norm() < 1e-12 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn transparent_slot_is_a_no_op() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let fp = FabryPerotModel::new(wire(), 1.5 * LAMBDA, DEFAULT_END_REFLECTION).unwrap();
        for geometry in [GuideGeometry::Infinite(wire()), GuideGeometry::Finite(fp)] {
            let slots = vec![
                SlotScatterer::new(27e-9, zero, one).unwrap(),
                SlotScatterer::new(400e-9, zero, one).unwrap(),
            ];
            let slotted = SlottedGuide::new(geometry, slots).unwrap();
            for &(a, b) in &[(0.0, 1.5 * LAMBDA), (1e-7, 3e-7)] {
                let got = slotted.slotted_guide_projected(a, b).unwrap().value();
                let want = geometry.projected_unslotted(a, b).unwrap().value();
                assert!((got - want).norm() < 1e-12 * want.norm());
            }
        }
    }

    #[test]
    fn slotted_guide_is_reciprocal() {
        let fp = FabryPerotModel::new(wire(), 1.5 * LAMBDA, Complex64::from_polar(0.7, 0.3)).unwrap();
        let slots = vec![
            SlotScatterer::with_defaults(27e-9).unwrap(),
            SlotScatterer::with_defaults(610.5e-9).unwrap(),
        ];
        let g = SlottedGuide::new(GuideGeometry::Finite(fp), slots).unwrap();
        for &(a, b) in &[(0.0, 1.5 * LAMBDA), (1e-7, 3e-7), (5e-7, 2e-8)] {
            let ab = g.slotted_guide_projected(a, b).unwrap().value();
            let ba = g.slotted_guide_projected(b, a).unwrap().value();
            assert!((ab - ba).norm() < 1e-12 * ab.norm());
        }
    }

    #[test]
    fn single_slot_reflection_adds_round_trip_echo() {
        // One slot at distance s to the right of both emitters (za = zb = 0):
        // u = 1 + r e^{2iks}.
        let s = 90e-9;
        let r = Complex64::new(0.2, 0.3);
        let slot = SlotScatterer::new(s, r, Complex64::new(0.6, 0.0)).unwrap();
        let g = SlottedGuide::new(GuideGeometry::Infinite(wire()), vec![slot]).unwrap();
        let got = g.slotted_guide_projected(0.0, 0.0).unwrap().value();
        let k = wire().wavenumber();
        let want = Complex64::i() * (1.0 + r * (2.0 * Complex64::i() * k * s).exp());
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn suitably_phased_slots_enhance_self_decay() {
        let base = wire();
        let bare = base.infinite_guide_projected(0.0, 0.0).decay_rate();
        let span = 1.5 * LAMBDA;
        let best = (1..200)
            .map(|n| {
                let offset = LAMBDA * n as f64 / 200.0;
                let slots = vec![
                    SlotScatterer::with_defaults(-offset).unwrap(),
                    SlotScatterer::with_defaults(span + offset).unwrap(),
                ];
                SlottedGuide::new(GuideGeometry::Infinite(base), slots)
                    .unwrap()
                    .slotted_guide_projected(0.0, 0.0)
                    .unwrap()
                    .decay_rate()
            })
            .fold(f64::MIN, f64::max);
        assert!(best > bare, "{best} <= {bare}");
    }

    #[test]
    fn slot_configuration_errors() {
        let a = SlotScatterer::with_defaults(1e-7).unwrap();
        assert!(matches!(
            SlottedGuide::new(GuideGeometry::Infinite(wire()), vec![a, a]),
            Err(Error::Configuration(_))
        ));
        let fp = FabryPerotModel::new(wire(), 0.5e-7, DEFAULT_END_REFLECTION).unwrap();
        assert!(SlottedGuide::new(GuideGeometry::Finite(fp), vec![a]).is_err());
        assert!(SlotScatterer::new(0.0, Complex64::new(0.8, 0.0), Complex64::new(0.8, 0.0)).is_err());
        let g = SlottedGuide::new(GuideGeometry::Infinite(wire()), vec![a]).unwrap();
        assert!(g.slotted_guide_projected(1e-7, 0.0).is_err());
    }

    #[test]
    fn reference_dipole_scales_quadratically() {
        let m = wire().with_reference_dipole(2.0).unwrap();
        let a = Site::on_axis("a", 0.0);
        let b = Site::on_axis("b", 1e-7);
        let j1 = m.projected(&a, &b, 1.0, &Vec3::new(2.0, 0.0, 0.0)).unwrap().value();
        let j2 = m.projected(&a, &b, 1.0, &Vec3::new(4.0, 0.0, 0.0)).unwrap().value();
        assert!((j2 - 4.0 * j1).norm() < 1e-15);
    }
}
