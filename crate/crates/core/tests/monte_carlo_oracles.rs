use std::f64::consts::{PI, TAU};

use ancilla::metrology::ghz_probability;
use ancilla::stochastic::{
    analytic_chi, calibrate_working_amplitude, run_ensemble, trajectory_phases, NoiseShape, NoiseSpec, PhasePolicy,
};

#[test]
fn ensemble_reproduces_decayed_ghz_probability() {
    let (n, omega, t, decay) = (4, TAU * 5.0, 1.0 / 32.0, 0.5);
    let closed = ghz_probability(n, omega, t, decay);
    assert!((closed - 0.2856).abs() < 5e-5);

    // shared noise calibrated so that the ensemble decay factor e^{-2χ} equals e^{-Γ_n}
    let mut spec = NoiseSpec::markovian_preset(7);
    spec.working_amplitude = calibrate_working_amplitude(&spec, n, t, decay).unwrap();
    let ens = run_ensemble(&spec, n, omega, 0.0, &[t], 20_000).unwrap();
    let diff = (ens.probability[0] - closed).abs();
    assert!(diff <= 3.0 * ens.stderr[0], "P_MC = {}, closed = {closed}, se = {}", ens.probability[0], ens.stderr[0]);
}

#[test]
fn single_tone_chi_matches_brute_force_average() {
    let spec = NoiseSpec {
        working_amplitude: 1.0,
        aux_amplitude: 0.0,
        base_frequency: 1.7,
        tones: 1,
        shape: NoiseShape::White,
        phase_policy: PhasePolicy::SharedAllQubits,
        seed: 99,
    };
    let t = PI / spec.base_frequency;
    let chi = analytic_chi(&spec, 1, t);
    assert!((chi - 0.5).abs() < 1e-15);

    let m = 100_000u64;
    let samples: Vec<f64> = (0..m).map(|k| trajectory_phases(&spec, 1, &[t], k)[0].powi(2)).collect();
    let mean = samples.iter().sum::<f64>() / m as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let se = (var / m as f64).sqrt();
    assert!((mean - chi).abs() <= 3.0 * se, "MC {mean} ± {se}, analytic {chi}");
}
