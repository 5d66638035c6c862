//! Property-based invariants across modules.

use casimir_sat::atomwall::{gamma_x, potential, AtomModel, TrapConfig};
use casimir_sat::cli::dataset::{DataPoint, ExperimentDataset, Normalization};
use casimir_sat::dielectric::{DielectricModel, Oscillator};
use casimir_sat::lifshitz::{ModeParts, QuadratureSpec, QuantityKind, ResultRow, ResultTable, ThermalState};
use casimir_sat::modecond::{reflection_imag, slab_reflection_imag, Polarization};
use casimir_sat::quad::Tolerance;
use casimir_sat::saturation::{
    bose, cutoff_distribution, shifted_distribution, smeared_term, SaturationModel,
};
use casimir_sat::special::{g_kernel, g_kernel_scaled};
use proptest::prelude::*;

const K_B: f64 = 1.380649e-23;

fn silica() -> DielectricModel {
    DielectricModel::OscillatorSet(vec![Oscillator {
        strength: 1.1,
        resonance: 2e16,
        damping: 0.0,
    }])
}

fn pol() -> impl Strategy<Value = Polarization> {
    prop_oneof![Just(Polarization::TM), Just(Polarization::TE)]
}

proptest! {
    #[test]
    fn reflection_is_bounded(p in pol(), q in 1e2f64..1e9, xi in 1e8f64..1e18, eps in 1.0f64..1e8, t in 1e-10f64..1e-5) {
        let r = reflection_imag(p, q, xi, eps);
        prop_assert!(r.abs() <= 1.0);
        let s = slab_reflection_imag(p, q, xi, eps, t);
        prop_assert!(s.abs() <= r.abs() * (1.0 + 1e-12));
        // signs: TM >= 0, TE <= 0 on the imaginary axis
        match p {
            Polarization::TM => prop_assert!(r >= 0.0),
            Polarization::TE => prop_assert!(r <= 0.0),
        }
    }

    #[test]
    fn g_kernel_is_increasing_and_continuous(z in 0.0f64..30.0, dz in 1e-3f64..1.0) {
        prop_assert!(g_kernel(z + dz) > g_kernel(z));
        prop_assert!(g_kernel(z) >= 1.0);
        let scaled = g_kernel_scaled(z);
        prop_assert!((scaled - g_kernel(z) * (-z).exp()).abs() <= 1e-12 * scaled.abs().max(1e-300));
    }

    #[test]
    fn saturated_occupations_never_exceed_bose(w in 1e9f64..1e16, t in 1.0f64..1000.0, damping in 1e-4f64..10.0, cap in 1e-3f64..10.0) {
        let beta = 1.0 / (K_B * t);
        let n = bose(w, beta);
        let s = shifted_distribution(w, beta, damping).unwrap();
        prop_assert!(s >= 0.0 && s <= n);
        let c = cutoff_distribution(w, beta, cap).unwrap();
        prop_assert!(c <= n && c <= cap);
    }

    #[test]
    fn smeared_constant_is_unchanged(center in 0.0f64..1e14, width in 1e10f64..1e14, value in -5.0f64..5.0) {
        let tol = Tolerance::new(1e-10, 1e-14, 200);
        let [v] = smeared_term(center, width, |_| Ok([value]), &tol).unwrap();
        prop_assert!((v - value).abs() <= 1e-8 * value.abs().max(1.0));
    }

    #[test]
    fn csv_and_json_round_trip(
        rows in prop::collection::vec((1e-9f64..1e-4, -1e3f64..1e3, proptest::option::of(-1.0f64..1.0), proptest::bool::ANY), 1..8),
        label in "[a-z][a-z0-9_=.-]{0,12}",
    ) {
        let mut t = ResultTable::new();
        t.set_meta("config.thermal.temperature", "3e2");
        for (d, v, err, with_parts) in rows {
            let mut r = ResultRow::new(d, QuantityKind::Energy, label.clone(), v);
            r.error = err.map(f64::abs);
            if with_parts {
                r.parts = Some(ModeParts { tm_propagating: v, tm_evanescent: -v, te_propagating: 0.5 * v, te_evanescent: 1e-300 });
                r.tm = Some(v);
                r.te = Some(0.5 * v);
            }
            t.push(r).unwrap();
        }
        prop_assert_eq!(&ResultTable::from_csv(&t.to_csv()).unwrap(), &t);
        prop_assert_eq!(&ResultTable::from_json(&t.to_json().unwrap()).unwrap(), &t);
    }

    #[test]
    fn dataset_text_round_trip(
        pts in prop::collection::vec((1e-9f64..1e-7, 0.1f64..2.0, 1e-4f64..0.1), 1..10),
        source in "[A-Za-z0-9 ]{0,20}",
    ) {
        let mut d = 0.0;
        let rows: Vec<DataPoint> = pts
            .into_iter()
            .map(|(step, value, error)| {
                d += step;
                DataPoint { separation: d, value, error }
            })
            .collect();
        let ds = ExperimentDataset::new(QuantityKind::PressureFactor, Normalization::NormalizedPressure, source.trim().to_string(), rows).unwrap();
        let back = ExperimentDataset::parse(&ds.to_text()).unwrap();
        prop_assert_eq!(back, ds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn atom_wall_potential_is_attractive_and_linear_in_alpha(d in 1e-6f64..2e-5, scale in 0.1f64..10.0) {
        let wall = silica();
        let quad = QuadratureSpec::default();
        let thermal = ThermalState::new(300.0).unwrap();
        let a1 = AtomModel::rubidium();
        let a2 = AtomModel::new(a1.static_polarizability * scale, a1.resonance).unwrap();
        let v1 = potential(d, &wall, &a1, &thermal, &SaturationModel::NONE, &quad).unwrap();
        let v2 = potential(d, &wall, &a2, &thermal, &SaturationModel::NONE, &quad).unwrap();
        prop_assert!(v1 < 0.0);
        prop_assert!((v2 - scale * v1).abs() <= 1e-6 * v2.abs());
    }

    #[test]
    fn gamma_x_decreases_with_separation(d in 5.5e-6f64..1.2e-5, step in 2e-7f64..2e-6) {
        let wall = silica();
        let quad = QuadratureSpec::default();
        let thermal = ThermalState::new(310.0).unwrap();
        let atom = AtomModel::rubidium();
        let trap = TrapConfig::rubidium();
        let g1 = gamma_x(d, &wall, &atom, &trap, &thermal, &SaturationModel::NONE, &quad).unwrap();
        let g2 = gamma_x(d + step, &wall, &atom, &trap, &thermal, &SaturationModel::NONE, &quad).unwrap();
        prop_assert!(g1 > g2 && g2 > 0.0);
    }
}
