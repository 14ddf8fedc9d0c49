mod common;

use common::linspace;
use fibrepol::coupling::{guided_stokes, DipolePose, PropagationDirection};
use fibrepol::mode::{solve_he11, FiberSpec, ModeSolution};
use fibrepol::scatterer::{
    fit_malus, guided_stokes_vs_excitation, malus_power, noisy_malus_samples, NanorodModel,
};
use fibrepol::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

fn reference() -> &'static ModeSolution {
    static MODE: OnceLock<ModeSolution> = OnceLock::new();
    MODE.get_or_init(|| solve_he11(&FiberSpec::nanofiber_637()).unwrap())
}

fn rod(ratio: f64, alpha: f64, theta: f64) -> NanorodModel {
    NanorodModel::with_ratio(ratio, DipolePose::new(alpha, theta, 9.0).unwrap()).unwrap()
}

/// Smallest separation of two orientations modulo 180°.
fn orientation_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

#[test]
fn noiseless_fit_is_exact() {
    let samples = malus_power(&rod(0.1, 0.0, 20.0), 25.0, &linspace(-90.0, 90.0, 37));
    let fit = fit_malus(&samples).unwrap();
    assert!(fit.orientation_defined);
    assert!(orientation_gap(fit.chi_max_deg, 25.0) < 1e-6);
    assert!((fit.amplitude - 0.99).abs() < 1e-9);
    assert!((fit.floor - 0.01).abs() < 1e-9);
}

#[test]
fn noisy_fits_within_half_degree() {
    // Half-turn polarizer scan in 0.5° steps.
    let chis = linspace(-90.0, 90.0, 361);
    let model = rod(0.1, 0.0, 20.0);
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let chi_max = -60.0 + 1.3 * seed as f64;
        let samples = noisy_malus_samples(&model, chi_max, &chis, 0.05, seed).unwrap();
        let fit = fit_malus(&samples).unwrap();
        worst = worst.max(orientation_gap(fit.chi_max_deg, chi_max));
    }
    println!("largest fitted-orientation error over 100 noisy trials: {worst:.4}°");
    assert!(worst < 0.5, "{worst}");
}

#[test]
fn noise_is_seeded() {
    let chis = linspace(0.0, 170.0, 18);
    let model = rod(0.1, 0.0, 0.0);
    let a = noisy_malus_samples(&model, 0.0, &chis, 0.05, 7).unwrap();
    assert_eq!(a, noisy_malus_samples(&model, 0.0, &chis, 0.05, 7).unwrap());
    assert_ne!(a, noisy_malus_samples(&model, 0.0, &chis, 0.05, 8).unwrap());
}

#[test]
fn flat_data_has_no_orientation() {
    let samples: Vec<(f64, f64)> = linspace(0.0, 170.0, 18).into_iter().map(|c| (c, 0.7)).collect();
    let fit = fit_malus(&samples).unwrap();
    assert!(!fit.orientation_defined);
    assert!(fit.amplitude.abs() < 1e-12);
}

#[test]
fn unusable_samples_fail() {
    let few = [(0.0, 1.0), (10.0, 0.9), (20.0, 0.8)];
    assert!(matches!(fit_malus(&few), Err(Error::FitFailure(_))));
    let narrow: Vec<(f64, f64)> = linspace(0.0, 30.0, 10).into_iter().map(|c| (c, 1.0)).collect();
    assert!(matches!(fit_malus(&narrow), Err(Error::FitFailure(_))));
}

#[test]
fn longitudinal_rod_has_no_drift_and_matches_fixed_dipole() {
    for (alpha, theta) in [(0.0, 20.0), (-35.0, 43.0), (60.0, -70.0)] {
        let model = rod(0.0, alpha, theta);
        let sweep = guided_stokes_vs_excitation(&model, reference(), 12.0, &linspace(-28.0, 52.0, 81)).unwrap();
        assert!(sweep.drift_deg <= 1e-12, "{}", sweep.drift_deg);
        let fixed = guided_stokes(reference(), &model.pose, PropagationDirection::Forward).normalized();
        for row in &sweep.rows {
            // χ − χ_max = ±90° leaves no induced moment at all.
            let Some(s) = row.stokes else {
                assert!(((row.chi_deg - 12.0).abs() - 90.0).abs() < 1e-9);
                continue;
            };
            assert!((s.s1 - fixed.s1).abs() < 1e-12);
            assert!((s.s2 - fixed.s2).abs() < 1e-12);
            assert!((s.s3 - fixed.s3).abs() < 1e-12);
        }
    }
}

#[test]
fn drift_grows_with_transverse_polarizability() {
    let chis = linspace(-40.0, 40.0, 81);
    let drifts: Vec<f64> = [0.0, 0.01, 0.03, 0.1, 0.2, 0.4]
        .iter()
        .map(|&r| guided_stokes_vs_excitation(&rod(r, 0.0, 20.0), reference(), 0.0, &chis).unwrap().drift_deg)
        .collect();
    assert!(drifts[0] <= 1e-12);
    assert!(drifts.windows(2).all(|w| w[1] > w[0]), "{drifts:?}");
    println!("drift over ±40° for α_T/α_L = 0.1 at θ = 20°: {:.3}° on the sphere", drifts[3]);
}

proptest! {
    #![proptest_config(common::proptest_cases(256))]

    #[test]
    fn malus_period_is_half_turn(k in -720i32..720, chi_max in -90.0f64..90.0, ratio in 0.0f64..1.0) {
        let chi = k as f64 * 0.25;
        let model = rod(ratio, 0.0, 10.0);
        let p = malus_power(&model, chi_max, &[chi, chi + 180.0]);
        prop_assert_eq!(p[0].1, p[1].1);
    }

    #[test]
    fn malus_power_is_normalized(chi in -180.0f64..180.0, ratio in 0.0f64..3.0) {
        let p = malus_power(&rod(ratio, 0.0, 0.0), 0.0, &[chi])[0].1;
        prop_assert!((0.0..=1.0 + 1e-15).contains(&p));
    }
}
