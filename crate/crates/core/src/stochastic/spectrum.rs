use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::noise::{NoiseSpec, PhasePolicy};
use crate::error::{domain, Error, Result};

/// Preset noise configurations of the three compared schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Shared working noise, no auxiliary compensation (`b₂ = 0`).
    SuperdecoherenceNoAux,
    /// Matched auxiliary with `b₂ = N b₁`.
    WithAux,
    /// Independent working noise per qubit, `b₂ = 0`.
    UncorrelatedPerQubit,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Self::UncorrelatedPerQubit, Self::SuperdecoherenceNoAux, Self::WithAux];

    pub fn label(&self) -> &'static str {
        match self {
            Self::SuperdecoherenceNoAux => "superdecoherence",
            Self::WithAux => "with_aux",
            Self::UncorrelatedPerQubit => "uncorrelated",
        }
    }
}

impl NoiseSpec {
    /// Copy of `self` with auxiliary amplitude and phase policy set for `scenario`.
    pub fn for_scenario(&self, scenario: Scenario, working: usize) -> NoiseSpec {
        let mut s = self.clone();
        match scenario {
            Scenario::SuperdecoherenceNoAux => {
                s.aux_amplitude = 0.0;
                s.phase_policy = PhasePolicy::SharedAllQubits;
            }
            Scenario::WithAux => {
                s.aux_amplitude = working as f64 * s.working_amplitude;
                s.phase_policy = PhasePolicy::WorkingSharedAuxMatched;
            }
            Scenario::UncorrelatedPerQubit => {
                s.aux_amplitude = 0.0;
                s.phase_policy = PhasePolicy::IndependentPerQubit;
            }
        }
        s
    }
}

/// Σ_j F(j)² sin²(ω_j t / 2).
fn tone_filter_sum(spec: &NoiseSpec, t: f64) -> f64 {
    (1..=spec.tones)
        .map(|j| {
            let f = spec.shape.weight(j);
            f * f * (0.5 * spec.tone_frequency(j) * t).sin().powi(2)
        })
        .sum()
}

/// Gaussian-limit decoherence function `χ(t) = ⟨φ_B²(t)⟩`.
///
/// Each tone contributes `⟨[sin(ω_j t + ψ) - sin ψ]²⟩_ψ = 2 sin²(ω_j t/2)`,
/// so `χ = (v/2) Σ_j F(j)² sin²(ω_j t/2)` with the channel variance
/// `v = N²b₁² + b₂²` (shared working row, independent auxiliary),
/// `(N b₁ - b₂)²` (matched auxiliary) or `N b₁² + b₂²` (independent rows).
pub fn analytic_chi(spec: &NoiseSpec, working: usize, t: f64) -> f64 {
    let n = working as f64;
    let (b1, b2) = (spec.working_amplitude, spec.aux_amplitude);
    let v = match spec.phase_policy {
        PhasePolicy::SharedAllQubits => n * n * b1 * b1 + b2 * b2,
        PhasePolicy::WorkingSharedAuxMatched => (n * b1 - b2).powi(2),
        PhasePolicy::IndependentPerQubit => n * b1 * b1 + b2 * b2,
    };
    if v == 0.0 {
        return 0.0;
    }
    0.5 * v * tone_filter_sum(spec, t)
}

pub fn analytic_chi_for(spec: &NoiseSpec, working: usize, t: f64, scenario: Scenario) -> f64 {
    analytic_chi(&spec.for_scenario(scenario, working), working, t)
}

/// Gaussian-limit readout `½[1 + cos2φ_A e^{-2χ}]`.
pub fn gaussian_probability(spec: &NoiseSpec, working: usize, frequency: f64, aux_frequency: f64, t: f64) -> f64 {
    let phase = (working as f64 * frequency - aux_frequency) * t;
    0.5 * (1.0 + phase.cos() * (-2.0 * analytic_chi(spec, working, t)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdPair {
    S11,
    S12,
    S21,
    S22,
}

/// Line at `±frequency`: the spectrum is `Σ weight [δ(ω - ω_j) + δ(ω + ω_j)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub frequency: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PsdComb {
    pub lines: Vec<SpectralLine>,
}

impl PsdComb {
    fn from_weights(spec: &NoiseSpec, scale: f64) -> Self {
        let w0 = spec.base_frequency;
        let lines = (1..=spec.tones)
            .map(|j| {
                let jf = j as f64 * spec.shape.weight(j);
                SpectralLine { frequency: spec.tone_frequency(j), weight: scale * PI * w0 * w0 / 2.0 * jf * jf }
            })
            .collect();
        Self { lines }
    }

    pub fn zeros(spec: &NoiseSpec) -> Self {
        Self::from_weights(spec, 0.0)
    }

    /// `Σ_i coeff_i · comb_i`, all combs on the same frequencies.
    pub fn combine(terms: &[(f64, &PsdComb)]) -> Self {
        let first = terms.first().map(|(_, c)| c.lines.len()).unwrap_or(0);
        let lines = (0..first)
            .map(|k| SpectralLine {
                frequency: terms[0].1.lines[k].frequency,
                weight: terms.iter().map(|(a, c)| a * c.lines[k].weight).sum(),
            })
            .collect();
        Self { lines }
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.lines.iter().map(|l| l.weight.abs()).fold(0.0, f64::max)
    }
}

/// Delta-comb weights of `S_ij(ω)`, the Fourier transform of
/// `⟨β_i(0) β_j(t)⟩`.
///
/// Cross spectra exist only when the auxiliary reuses the working phases.
/// Otherwise they are zero; that is reported as a policy error unless
/// `allow_uncorrelated` is set, in which case an all-zero comb is returned.
pub fn psd_components(spec: &NoiseSpec, pair: PsdPair, allow_uncorrelated: bool) -> Result<PsdComb> {
    spec.validate()?;
    let (b1, b2) = (spec.working_amplitude, spec.aux_amplitude);
    Ok(match pair {
        PsdPair::S11 => PsdComb::from_weights(spec, b1 * b1),
        PsdPair::S22 => PsdComb::from_weights(spec, b2 * b2),
        PsdPair::S12 | PsdPair::S21 => match spec.phase_policy {
            PhasePolicy::WorkingSharedAuxMatched => PsdComb::from_weights(spec, b1 * b2),
            _ if allow_uncorrelated => PsdComb::zeros(spec),
            policy => {
                return Err(Error::Policy(format!(
                    "cross spectrum {pair:?} requires matched auxiliary phases, policy is {policy:?}"
                )))
            }
        },
    })
}

/// Total spectrum of `½(N β₁ - β₂)`: `¼[N²S11 - N S12 - N S21 + S22]` for a
/// shared working row, `¼[N S11 + S22]` for independent rows.
pub fn total_psd(spec: &NoiseSpec, working: usize) -> Result<PsdComb> {
    let n = working as f64;
    let s11 = psd_components(spec, PsdPair::S11, true)?;
    let s22 = psd_components(spec, PsdPair::S22, true)?;
    Ok(match spec.phase_policy {
        PhasePolicy::IndependentPerQubit => PsdComb::combine(&[(0.25 * n, &s11), (0.25, &s22)]),
        _ => {
            let s12 = psd_components(spec, PsdPair::S12, true)?;
            let s21 = psd_components(spec, PsdPair::S21, true)?;
            PsdComb::combine(&[(0.25 * n * n, &s11), (-0.25 * n, &s12), (-0.25 * n, &s21), (0.25, &s22)])
        }
    })
}

/// `χ(t) = (4/2π) ∫ dω S(ω) sin²(ωt/2) / ω²` for a delta comb; the mirrored
/// line at `-ω_j` doubles each positive-frequency term.
pub fn chi_from_psd(comb: &PsdComb, t: f64) -> f64 {
    let sum: f64 = comb
        .lines
        .iter()
        .map(|l| 2.0 * l.weight * (0.5 * l.frequency * t).sin().powi(2) / (l.frequency * l.frequency))
        .sum();
    4.0 / (2.0 * PI) * sum
}

/// Working amplitude b₁ for which the superdecoherence factor `2χ` reaches
/// `target` at `t_ref`, all other fields of `spec` unchanged.
pub fn calibrate_working_amplitude(spec: &NoiseSpec, working: usize, t_ref: f64, target: f64) -> Result<f64> {
    if !(t_ref > 0.0 && target > 0.0) {
        return Err(domain(format!("calibration needs t_ref > 0 and target > 0, got {t_ref}, {target}")));
    }
    let mut unit = spec.for_scenario(Scenario::SuperdecoherenceNoAux, working);
    unit.working_amplitude = 1.0;
    let chi = analytic_chi(&unit, working, t_ref);
    if chi <= 0.0 {
        return Err(domain("noise has no spectral weight at the calibration time"));
    }
    Ok((target / (2.0 * chi)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::noise::NoiseShape;
    use proptest::prelude::*;

    fn spec(b1: f64, tones: usize) -> NoiseSpec {
        NoiseSpec {
            working_amplitude: b1,
            aux_amplitude: 0.0,
            base_frequency: 1.3,
            tones,
            shape: NoiseShape::White,
            phase_policy: PhasePolicy::SharedAllQubits,
            seed: 3,
        }
    }

    #[test]
    fn with_aux_and_zero_time_vanish() {
        let s = spec(0.8, 50);
        for &t in &[0.0, 0.1, 2.0, 17.0] {
            assert_eq!(analytic_chi_for(&s, 4, t, Scenario::WithAux), 0.0);
        }
        for sc in Scenario::ALL {
            assert_eq!(analytic_chi_for(&s, 4, 0.0, sc), 0.0);
        }
    }

    #[test]
    fn single_tone_half_period() {
        let mut s = spec(1.0, 1);
        s.base_frequency = 2.0;
        // N = 1, b₁ = 1, t = π/ω₀: χ = ½ F(1)² sin²(π/2) = ½
        let chi = analytic_chi_for(&s, 1, PI / 2.0, Scenario::SuperdecoherenceNoAux);
        assert!((chi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn white_s11_is_flat() {
        let s = spec(0.6, 12);
        let comb = psd_components(&s, PsdPair::S11, false).unwrap();
        let expected = PI * 0.36 * 1.3 * 1.3 / 2.0;
        assert!(comb.lines.iter().all(|l| (l.weight - expected).abs() < 1e-14));
    }

    #[test]
    fn matched_total_psd_vanishes() {
        let s = spec(0.6, 30).for_scenario(Scenario::WithAux, 4);
        let total = total_psd(&s, 4).unwrap();
        let scale = psd_components(&s, PsdPair::S22, false).unwrap().max_abs_weight();
        assert!(total.max_abs_weight() <= 1e-14 * scale);
        assert!(chi_from_psd(&total, 0.7).abs() < 1e-14);
    }

    #[test]
    fn unmatched_total_psd_is_scaled_s11() {
        let s = spec(0.6, 30);
        let total = total_psd(&s, 4).unwrap();
        let s11 = psd_components(&s, PsdPair::S11, false).unwrap();
        for (a, b) in total.lines.iter().zip(&s11.lines) {
            assert!((a.weight - 4.0 * b.weight).abs() < 1e-13);
        }
    }

    #[test]
    fn cross_spectrum_policy() {
        let s = spec(0.6, 5).for_scenario(Scenario::UncorrelatedPerQubit, 3);
        assert!(matches!(psd_components(&s, PsdPair::S12, false), Err(Error::Policy(_))));
        let z = psd_components(&s, PsdPair::S21, true).unwrap();
        assert_eq!(z.max_abs_weight(), 0.0);
        assert_eq!(z.lines.len(), 5);
    }

    #[test]
    fn single_line_hand_value() {
        let comb = PsdComb { lines: vec![SpectralLine { frequency: 3.0, weight: 0.4 }] };
        let t = 0.9;
        let expected = 4.0 / (2.0 * PI) * 2.0 * 0.4 * (1.5f64 * t).sin().powi(2) / 9.0;
        assert!((chi_from_psd(&comb, t) - expected).abs() < 1e-16);
        assert_eq!(chi_from_psd(&PsdComb::default(), t), 0.0);
    }

    #[test]
    fn uncorrelated_chi_is_super_over_n() {
        let s = spec(0.9, 80);
        for n in 1..8 {
            for &t in &[0.01, 0.3, 2.2] {
                let sup = analytic_chi_for(&s, n, t, Scenario::SuperdecoherenceNoAux);
                let un = analytic_chi_for(&s, n, t, Scenario::UncorrelatedPerQubit);
                assert!((un / sup - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn calibration_hits_target() {
        let s = NoiseSpec::markovian_preset(1);
        let b1 = calibrate_working_amplitude(&s, 4, 1.0 / 32.0, 1.0).unwrap();
        let mut cal = s.clone();
        cal.working_amplitude = b1;
        let chi = analytic_chi_for(&cal, 4, 1.0 / 32.0, Scenario::SuperdecoherenceNoAux);
        assert!((2.0 * chi - 1.0).abs() < 1e-12);
    }

    fn spec_strategy() -> impl Strategy<Value = NoiseSpec> {
        (0.01f64..3.0, 0.0f64..5.0, 0.05f64..5.0, 1usize..60, 0.0f64..2.5, 0usize..3).prop_map(
            |(b1, b2, w0, tones, exponent, policy)| NoiseSpec {
                working_amplitude: b1,
                aux_amplitude: b2,
                base_frequency: w0,
                tones,
                shape: NoiseShape::PowerLaw { exponent },
                phase_policy: [
                    PhasePolicy::SharedAllQubits,
                    PhasePolicy::IndependentPerQubit,
                    PhasePolicy::WorkingSharedAuxMatched,
                ][policy],
                seed: 0,
            },
        )
    }

    proptest! {
        #[test]
        fn psd_route_equals_analytic(s in spec_strategy(), n in 1usize..8, t in 0.0f64..10.0) {
            let a = analytic_chi(&s, n, t);
            let p = chi_from_psd(&total_psd(&s, n).unwrap(), t);
            prop_assert!((a - p).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
