use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Tone-amplitude profile F(j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseShape {
    /// F(j) = 1/j: every tone has the same amplitude ω_j F(j) = ω₀.
    White,
    /// F(j) = j^(-exponent).
    PowerLaw { exponent: f64 },
}

impl NoiseShape {
    pub fn weight(&self, j: usize) -> f64 {
        match *self {
            Self::White => 1.0 / j as f64,
            Self::PowerLaw { exponent } => (j as f64).powf(-exponent),
        }
    }
}

/// How random phases are shared between qubits in one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePolicy {
    /// One phase row for all working qubits, an independent row for the auxiliary.
    SharedAllQubits,
    /// One phase row per working qubit plus one for the auxiliary.
    IndependentPerQubit,
    /// Working qubits share one row and the auxiliary reuses it.
    WorkingSharedAuxMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChannel {
    Working,
    Auxiliary,
}

/// Engineered multi-tone dephasing field
/// `β(t) = b Σ_{j=1..J} ω_j F(j) cos(ω_j t + ψ_j)` with `ω_j = j ω₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// b₁, rad/s per unit tone amplitude.
    pub working_amplitude: f64,
    /// b₂.
    pub aux_amplitude: f64,
    /// ω₀, rad/s.
    pub base_frequency: f64,
    /// J; the cutoff is J ω₀.
    pub tones: usize,
    pub shape: NoiseShape,
    pub phase_policy: PhasePolicy,
    pub seed: u64,
}

impl NoiseSpec {
    /// White noise from base and cutoff frequencies given in Hz.
    pub fn white_from_hz(base_hz: f64, cutoff_hz: f64, working_amplitude: f64, seed: u64) -> Result<Self> {
        if !(base_hz > 0.0 && cutoff_hz >= base_hz) {
            return Err(domain(format!("need 0 < base <= cutoff, got {base_hz} Hz, {cutoff_hz} Hz")));
        }
        let spec = Self {
            working_amplitude,
            aux_amplitude: 0.0,
            base_frequency: TAU * base_hz,
            tones: (cutoff_hz / base_hz).round() as usize,
            shape: NoiseShape::White,
            phase_policy: PhasePolicy::SharedAllQubits,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 0.2 Hz base, 140 Hz cutoff: Markovian-like decay over the grid.
    pub fn markovian_preset(seed: u64) -> Self {
        Self::white_from_hz(0.2, 140.0, 1.0, seed).expect("valid preset")
    }

    /// 1 mHz base, 0.18 Hz cutoff: quadratic (non-Markovian) decay.
    pub fn non_markovian_preset(seed: u64) -> Self {
        Self::white_from_hz(1e-3, 0.18, 1.0, seed).expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        if self.tones == 0 {
            return Err(domain("noise needs at least one tone"));
        }
        if !(self.base_frequency > 0.0 && self.base_frequency.is_finite()) {
            return Err(domain(format!("base frequency must be positive, got {}", self.base_frequency)));
        }
        if !(self.working_amplitude.is_finite() && self.aux_amplitude.is_finite()) {
            return Err(domain("noise amplitudes must be finite"));
        }
        if let NoiseShape::PowerLaw { exponent } = self.shape {
            if !exponent.is_finite() {
                return Err(domain("power-law exponent must be finite"));
            }
        }
        Ok(())
    }

    pub fn tone_frequency(&self, j: usize) -> f64 {
        j as f64 * self.base_frequency
    }

    pub fn cutoff(&self) -> f64 {
        self.tone_frequency(self.tones)
    }

    /// Weight applied to the summed working-channel increments: `N b₁`
    /// when all working qubits share a row, `b₁` per row otherwise.
    pub(crate) fn working_weight(&self, working: usize) -> f64 {
        match self.phase_policy {
            PhasePolicy::IndependentPerQubit => self.working_amplitude,
            _ => working as f64 * self.working_amplitude,
        }
    }

    fn amplitude(&self, channel: NoiseChannel) -> f64 {
        match channel {
            NoiseChannel::Working => self.working_amplitude,
            NoiseChannel::Auxiliary => self.aux_amplitude,
        }
    }
}

/// Random tone phases of one trajectory, each uniform on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSet {
    working: Vec<Vec<f64>>,
    aux: Option<Vec<f64>>,
}

impl PhaseSet {
    /// Phases of trajectory `trajectory`. Each trajectory owns the ChaCha
    /// stream with that index under `spec.seed`; rows are drawn working
    /// first, then auxiliary, tone by tone, so any trajectory can be
    /// regenerated on its own.
    pub fn draw(spec: &NoiseSpec, working: usize, trajectory: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(trajectory);
        let mut row = || -> Vec<f64> {
            (0..spec.tones)
                .map(|_| {
                    let psi = TAU * rng.random::<f64>();
                    if psi < TAU {
                        psi
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let rows = match spec.phase_policy {
            PhasePolicy::IndependentPerQubit => working,
            _ => 1,
        };
        let working_rows = (0..rows).map(|_| row()).collect();
        let aux = match spec.phase_policy {
            PhasePolicy::WorkingSharedAuxMatched => None,
            _ => Some(row()),
        };
        Self { working: working_rows, aux }
    }

    /// Explicit phases: one row per working channel and an optional
    /// auxiliary row (`None` reuses the first working row).
    pub fn from_rows(working: Vec<Vec<f64>>, aux: Option<Vec<f64>>) -> Self {
        Self { working, aux }
    }

    pub fn working_rows(&self) -> &[Vec<f64>] {
        &self.working
    }

    pub fn aux_row(&self) -> &[f64] {
        self.aux.as_deref().unwrap_or(&self.working[0])
    }

    pub fn aux_is_matched(&self) -> bool {
        self.aux.is_none()
    }
}

/// `β(t)` of one channel for the phase row `row`, by direct tone summation.
pub fn noise_amplitude(spec: &NoiseSpec, row: &[f64], channel: NoiseChannel, t: f64) -> f64 {
    let b = spec.amplitude(channel);
    b * row
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let j = k + 1;
            let w = spec.tone_frequency(j);
            w * spec.shape.weight(j) * (w * t + psi).cos()
        })
        .sum::<f64>()
}

/// `∫₀ᵗ cos(ωτ + ψ) dτ · ω = sin(ωt + ψ) - sin ψ`.
#[inline]
fn increment(w: f64, psi: f64, t: f64) -> f64 {
    (w * t + psi).sin() - psi.sin()
}

/// `φ_B(t) = ½[N ∫β₁ - ∫β₂]`, integrated exactly tone by tone.
///
/// With a matched auxiliary row and `b₂ = N b₁` every tone cancels exactly.
pub fn accumulated_phase(spec: &NoiseSpec, phases: &PhaseSet, working: usize, t: f64) -> f64 {
    let w_work = spec.working_weight(working);
    let b_aux = spec.aux_amplitude;
    let aux = phases.aux_row();
    let mut total = 0.0;
    for k in 0..spec.tones {
        let j = k + 1;
        let w = spec.tone_frequency(j);
        let work: f64 = phases.working.iter().map(|row| increment(w, row[k], t)).sum();
        let tone = w_work * work - b_aux * increment(w, aux[k], t);
        total += spec.shape.weight(j) * tone;
    }
    0.5 * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn spec(tones: usize, policy: PhasePolicy) -> NoiseSpec {
        NoiseSpec {
            working_amplitude: 1.0,
            aux_amplitude: 0.0,
            base_frequency: 1.0,
            tones,
            shape: NoiseShape::White,
            phase_policy: policy,
            seed: 42,
        }
    }

    #[test]
    fn single_tone_amplitude() {
        let s = spec(1, PhasePolicy::SharedAllQubits);
        assert_eq!(noise_amplitude(&s, &[0.0], NoiseChannel::Working, 0.0), 1.0);
        assert_eq!(noise_amplitude(&s, &[0.0], NoiseChannel::Auxiliary, 0.0), 0.0);
    }

    #[test]
    fn quarter_phase_white_amplitude_vanishes() {
        let s = spec(9, PhasePolicy::SharedAllQubits);
        let row = vec![FRAC_PI_2; 9];
        assert!(noise_amplitude(&s, &row, NoiseChannel::Working, 0.0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_matches_resummation() {
        let mut s = spec(3, PhasePolicy::SharedAllQubits);
        s.working_amplitude = 0.7;
        s.base_frequency = 2.3;
        let phases = PhaseSet::draw(&s, 1, 5);
        let row = &phases.working_rows()[0];
        let t = 0.37;
        let mut expected = 0.0;
        for j in 1..=3 {
            let w = j as f64 * 2.3;
            expected += 0.7 * w * (1.0 / j as f64) * (w * t + row[j - 1]).cos();
        }
        assert!((noise_amplitude(&s, row, NoiseChannel::Working, t) - expected).abs() < 1e-13);
    }

    #[test]
    fn single_tone_hand_integral() {
        let mut s = spec(1, PhasePolicy::SharedAllQubits);
        s.base_frequency = 2.0;
        let phases = PhaseSet::from_rows(vec![vec![0.0]], Some(vec![0.0]));
        assert!(accumulated_phase(&s, &phases, 1, FRAC_PI_2).abs() < 1e-15);
        assert!((accumulated_phase(&s, &phases, 1, FRAC_PI_4) - 0.5).abs() < 1e-15);
        assert_eq!(accumulated_phase(&s, &phases, 1, 0.0), 0.0);
    }

    #[test]
    fn accumulated_phase_matches_quadrature_of_amplitude() {
        let mut s = spec(5, PhasePolicy::SharedAllQubits);
        s.aux_amplitude = 0.4;
        let phases = PhaseSet::draw(&s, 3, 11);
        let t = 1.7;
        let steps = 20_000;
        let h = t / steps as f64;
        // composite Simpson on β₁, β₂
        let integral = |row: &[f64], ch| {
            let mut acc = noise_amplitude(&s, row, ch, 0.0) + noise_amplitude(&s, row, ch, t);
            for k in 1..steps {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * noise_amplitude(&s, row, ch, k as f64 * h);
            }
            acc * h / 3.0
        };
        let expected = 0.5
            * (3.0 * integral(&phases.working_rows()[0], NoiseChannel::Working)
                - integral(phases.aux_row(), NoiseChannel::Auxiliary));
        assert!((accumulated_phase(&s, &phases, 3, t) - expected).abs() < 1e-9);
    }

    #[test]
    fn matched_aux_cancels_every_tone_exactly() {
        let mut s = spec(700, PhasePolicy::WorkingSharedAuxMatched);
        s.working_amplitude = 0.37;
        s.aux_amplitude = 4.0 * 0.37;
        for traj in 0..20 {
            let phases = PhaseSet::draw(&s, 4, traj);
            assert!(phases.aux_is_matched());
            for &t in &[0.0, 0.013, 0.5, PI] {
                assert_eq!(accumulated_phase(&s, &phases, 4, t), 0.0);
            }
        }
    }

    #[test]
    fn phase_draws_are_reproducible_and_in_range() {
        let s = spec(50, PhasePolicy::IndependentPerQubit);
        let a = PhaseSet::draw(&s, 3, 17);
        let b = PhaseSet::draw(&s, 3, 17);
        assert_eq!(a, b);
        assert_eq!(a.working_rows().len(), 3);
        assert_ne!(a, PhaseSet::draw(&s, 3, 18));
        for row in a.working_rows().iter().chain(std::iter::once(&a.aux_row().to_vec())) {
            assert!(row.iter().all(|&p| (0.0..TAU).contains(&p)));
        }
    }

    #[test]
    fn presets_resolve_tone_counts() {
        assert_eq!(NoiseSpec::markovian_preset(0).tones, 700);
        assert_eq!(NoiseSpec::non_markovian_preset(0).tones, 180);
        assert!((NoiseSpec::markovian_preset(0).base_frequency - TAU * 0.2).abs() < 1e-15);
        assert!(NoiseSpec::white_from_hz(1.0, 0.5, 1.0, 0).is_err());
    }
}
