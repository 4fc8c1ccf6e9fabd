use nalgebra::{Matrix4, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use plasmon_qed::constants::{DEBYE, MICROMETER, NANOMETER, SPEED_OF_LIGHT};
use plasmon_qed::dynamics::{evolve, DensityMatrix, Liouvillian, PumpConfig, PumpRegime, EG};
use plasmon_qed::entanglement::concurrence_general;
use plasmon_qed::greens::{
    FabryPerotModel, FreeSpace, GreenProvider, GuideGeometry, Plasmon1DModel, Site, SlotScatterer, SlottedGuide,
};
use plasmon_qed::io::{apply_overrides, parse_scenario, serialize};
use plasmon_qed::rates::{compute_rates, convert, QubitPair, RateMatrix, Unit};

const LAMBDA: f64 = 425.0 * NANOMETER;

fn omega() -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (600.0 * NANOMETER)
}

fn base() -> Plasmon1DModel {
    let gamma = convert(2.0, Unit::MicroElectronVolt, Unit::RadPerSecond).unwrap();
    Plasmon1DModel::new(LAMBDA, 1.7 * MICROMETER, gamma)
        .unwrap()
        .with_reference_dipole(30.0 * DEBYE)
        .unwrap()
}

fn dipole() -> Vector3<f64> {
    Vector3::new(30.0 * DEBYE, 0.0, 0.0)
}

fn finite(length: f64, r: Complex64) -> FabryPerotModel {
    FabryPerotModel::new(base(), length, r).unwrap()
}

fn j(p: &dyn GreenProvider, za: f64, zb: f64) -> Complex64 {
    p.projected(&Site::on_axis("a", za), &Site::on_axis("b", zb), omega(), &dipole())
        .unwrap()
        .value()
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
}

fn reflection() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, -3.2..3.2f64).prop_map(|(m, p)| Complex64::from_polar(m, p))
}

/// Passive symmetric slot, built from the scattering eigenvalues `r ± t`.
fn slot_coefficients() -> impl Strategy<Value = (Complex64, Complex64)> {
    (0.0..1.0f64, -3.2..3.2f64, 0.0..1.0f64, -3.2..3.2f64)
        .prop_map(|(m1, p1, m2, p2)| {
            let (s1, s2) = (Complex64::from_polar(m1, p1), Complex64::from_polar(m2, p2));
            ((s1 + s2) / 2.0, (s1 - s2) / 2.0)
        })
        .prop_filter("slot must transmit", |(_, t)| t.norm() > 0.1)
}

fn slotted_providers(length: f64, r_end: Complex64, slot_z: f64, rt: (Complex64, Complex64)) -> Vec<SlottedGuide> {
    let slot = SlotScatterer::new(slot_z, rt.0, rt.1).unwrap();
    vec![
        SlottedGuide::new(GuideGeometry::Infinite(base()), vec![slot]).unwrap(),
        SlottedGuide::new(GuideGeometry::Finite(finite(length, r_end)), vec![slot]).unwrap(),
    ]
}

fn random_state(v: &[f64]) -> DensityMatrix {
    let a = Matrix4::from_fn(|r, c| Complex64::new(v[4 * r + c], v[16 + 4 * r + c]));
    let m = a * a.adjoint();
    DensityMatrix::new(m / m.trace()).unwrap()
}

fn local_unitary(p: &[f64]) -> Matrix4<Complex64> {
    let su2 = |a: f64, b: f64, c: f64| {
        let (s, co) = (a.sin(), a.cos());
        nalgebra::Matrix2::new(
            Complex64::from_polar(co, b),
            Complex64::from_polar(s, c),
            -Complex64::from_polar(s, -c),
            Complex64::from_polar(co, -b),
        )
    };
    su2(p[0], p[1], p[2]).kronecker(&su2(p[3], p[4], p[5]))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn providers_are_reciprocal(
        za in 0.0..1.0f64,
        zb in 0.0..1.0f64,
        r_end in reflection(),
        slot in 0.05..0.95f64,
        rt in slot_coefficients(),
    ) {
        let length = 2.0 * LAMBDA;
        let (za, zb) = (za * length, zb * length);
        let mut providers: Vec<Box<dyn GreenProvider>> = vec![Box::new(base()), Box::new(finite(length, r_end))];
        for s in slotted_providers(length, r_end, slot * length, rt) {
            providers.push(Box::new(s));
        }
        for p in &providers {
            prop_assert!(close(j(p.as_ref(), za, zb), j(p.as_ref(), zb, za), 1e-9));
        }
    }

    #[test]
    fn free_space_is_reciprocal(a in prop::array::uniform3(-500.0..500.0f64), b in prop::array::uniform3(-500.0..500.0f64)) {
        let (ra, rb) = (Vector3::from(a) * NANOMETER, Vector3::from(b) * NANOMETER);
        prop_assume!((ra - rb).norm() > NANOMETER);
        let sa = Site::new("a", ra);
        let sb = Site::new("b", rb);
        let ab = FreeSpace.projected(&sa, &sb, omega(), &dipole()).unwrap().value();
        let ba = FreeSpace.projected(&sb, &sa, omega(), &dipole()).unwrap().value();
        prop_assert!(close(ab, ba, 1e-12));
    }

    #[test]
    fn guide_rates_are_passive(
        za in 0.0..1.0f64,
        zb in 0.0..1.0f64,
        r_end in reflection(),
        slot in 0.05..0.95f64,
        rt in slot_coefficients(),
    ) {
        let length = 1.5 * LAMBDA;
        let pair = QubitPair::new(omega(), dipole(), Site::on_axis("a", za * length), Site::on_axis("b", zb * length)).unwrap();
        prop_assume!(za != zb);
        let mut providers: Vec<Box<dyn GreenProvider>> = vec![Box::new(base()), Box::new(finite(length, r_end))];
        for s in slotted_providers(length, r_end, slot * length, rt) {
            providers.push(Box::new(s));
        }
        for p in &providers {
            for vacuum in [false, true] {
                let r = compute_rates(&pair, p.as_ref(), vacuum);
                prop_assert!(r.is_ok(), "{:?}", r);
            }
        }
    }

    #[test]
    fn reflectionless_finite_guide_is_the_infinite_guide(za in 0.0..1.0f64, zb in 0.0..1.0f64, l in 0.3..4.0f64) {
        let length = l * LAMBDA;
        let fp = finite(length, Complex64::new(0.0, 0.0));
        let (za, zb) = (za * length, zb * length);
        prop_assert!(close(j(&fp, za, zb), j(&base(), za, zb), 1e-12));
    }

    #[test]
    fn transparent_slots_change_nothing(za in 0.0..1.0f64, zb in 0.0..1.0f64, slot in 0.05..0.95f64, r_end in reflection()) {
        let length = 1.5 * LAMBDA;
        let (za, zb) = (za * length, zb * length);
        let clear = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let slotted = slotted_providers(length, r_end, slot * length, clear);
        prop_assert!(close(j(&slotted[0], za, zb), j(&base(), za, zb), 1e-12));
        let (a, b) = (j(&slotted[1], za, zb), j(&finite(length, r_end), za, zb));
        prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
    }

    #[test]
    fn infinite_guide_satisfies_positivity(dz in 0.0..20.0f64, l in 0.1..10.0f64) {
        let m = Plasmon1DModel::new(LAMBDA, l * MICROMETER, 1.0).unwrap();
        let aa = m.infinite_guide_projected(0.0, 0.0).imag_part();
        let ab = m.infinite_guide_projected(0.0, dz * LAMBDA).imag_part();
        prop_assert!(ab.abs() <= aa * (1.0 + 1e-15));
    }

    #[test]
    fn normalized_rates_do_not_depend_on_dipole_strength(
        scale in 0.1..10.0f64,
        za in 0.0..1.0f64,
        zb in 0.0..1.0f64,
        r_end in reflection(),
    ) {
        let length = 1.5 * LAMBDA;
        prop_assume!(za != zb);
        let site = |l: &str, z: f64| Site::on_axis(l, z * length);
        let fp = finite(length, r_end);
        let rates = |d: Vector3<f64>| {
            let pair = QubitPair::new(omega(), d, site("a", za), site("b", zb)).unwrap();
            let r = compute_rates(&pair, &fp, true).unwrap();
            [r.gamma_bb, r.gamma_ab, r.g_ab].map(|x| x / r.gamma_aa)
        };
        let (x, y) = (rates(dipole()), rates(dipole() * scale));
        for k in 0..3 {
            prop_assert!((x[k] - y[k]).abs() <= 1e-10 * x[k].abs().max(1.0));
        }
    }

    #[test]
    fn mirror_placement_gives_equal_self_rates(z in 0.0..0.5f64, r_end in reflection(), l in 0.5..3.0f64) {
        let length = l * LAMBDA;
        let pair = QubitPair::new(omega(), dipole(), Site::on_axis("a", z * length), Site::on_axis("b", length - z * length)).unwrap();
        prop_assume!(z < 0.5 - 1e-6);
        let r = compute_rates(&pair, &finite(length, r_end), true).unwrap();
        prop_assert!((r.gamma_aa - r.gamma_bb).abs() <= 1e-9 * r.gamma_aa);
    }

    #[test]
    fn trajectories_stay_physical(
        gaa in 0.2..2.0f64,
        gbb in 0.2..2.0f64,
        frac in -1.0..1.0f64,
        g in -2.0..2.0f64,
        deph in prop::array::uniform2(0.0..0.5f64),
        rabi in prop::array::uniform2(-1.0..1.0f64),
        detuning in -1.0..1.0f64,
    ) {
        let gab = frac * (gaa * gbb).sqrt();
        let r = RateMatrix::symmetric(gaa, gbb, gab, g).unwrap();
        let pump = PumpConfig::new(rabi[0].into(), rabi[1].into(), detuning, detuning, PumpRegime::Custom).unwrap();
        let l = Liouvillian::build(&r, deph, Some(&pump)).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let traj = evolve(&l, &DensityMatrix::basis_state(EG), &times).unwrap();
        for c in traj.concurrence().unwrap() {
            prop_assert!((0.0..=1.0).contains(&c));
        }
        prop_assert!(traj.max_correction < 1e-8);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(
        v in prop::collection::vec(-1.0..1.0f64, 32),
        p in prop::collection::vec(-3.2..3.2f64, 6),
    ) {
        let rho = random_state(&v);
        let u = local_unitary(&p);
        let rotated = DensityMatrix::new(u * rho.elements() * u.adjoint()).unwrap();
        let c0 = concurrence_general(&rho).unwrap().value;
        let c1 = concurrence_general(&rotated).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&c0));
        prop_assert!((c0 - c1).abs() < 1e-10);
    }

    #[test]
    fn scenarios_survive_a_round_trip(
        gaa in 1.0..20.0f64,
        frac in -1.0..1.0f64,
        g in -10.0..10.0f64,
        deph in prop::array::uniform2(0.0..2.0f64),
        rabi in prop::collection::vec(0.01..5.0f64, 1..4),
        samples in 2usize..3000,
    ) {
        let text = format!(
            "[provider]\nkind = \"direct\"\ngamma_aa_uev = {gaa}\ngamma_ab_uev = {}\ng_ab_uev = {g}\n\n\
             [qubits]\ndephasing_uev = [{}, {}]\n\n\
             [pump]\nregimes = [\"symmetric\", \"asymmetric\"]\nrabi_over_gamma_aa = {rabi:?}\n\n\
             [run]\nmode = \"steady\"\nsamples = {samples}\n",
            frac * gaa, deph[0], deph[1]
        );
        let s = parse_scenario(&text).unwrap();
        prop_assert_eq!(parse_scenario(&serialize(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn overrides_on_distinct_keys_commute(dip in 1.0..50.0f64, f in 100.0..900.0f64, zb in 100.0..900.0f64) {
        let text = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/fig4_nanowire_finite.toml"),
        ).unwrap();
        let sets = [
            format!("qubits.dipole_debye={dip}"),
            format!("qubits.frequency_thz={f}"),
            format!("qubits.position_b_nm=[0.0, 0.0, {}]", zb.min(637.5)),
        ];
        let forward = apply_overrides(&text, &sets).unwrap();
        let mut reversed = sets.to_vec();
        reversed.reverse();
        prop_assert_eq!(forward, apply_overrides(&text, &reversed).unwrap());
    }
}
