use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    /// Angular frequency ω_k, rad/s.
    pub frequency: f64,
    /// Reference coupling g_k, rad/s.
    pub coupling: f64,
}

/// Discrete bosonic bath. Qubit `i` couples to mode `k` with
/// `g_k^(i) = multipliers[i] * g_k`; temperature is in units with ħ = k_B = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModeBath")]
pub struct ModeBath {
    modes: Vec<BathMode>,
    temperature: f64,
    multipliers: Vec<f64>,
}

#[derive(Deserialize)]
struct RawModeBath {
    modes: Vec<BathMode>,
    temperature: f64,
    multipliers: Vec<f64>,
}

impl TryFrom<RawModeBath> for ModeBath {
    type Error = Error;

    fn try_from(raw: RawModeBath) -> Result<Self> {
        Self::new(raw.modes, raw.temperature, raw.multipliers)
    }
}

impl ModeBath {
    pub fn new(modes: Vec<BathMode>, temperature: f64, multipliers: Vec<f64>) -> Result<Self> {
        if let Some(m) = modes.iter().find(|m| !(m.frequency > 0.0 && m.frequency.is_finite())) {
            return Err(domain(format!("mode frequencies must be positive, got {}", m.frequency)));
        }
        if !(temperature >= 0.0) {
            return Err(domain(format!("temperature must be >= 0, got {temperature}")));
        }
        Ok(Self { modes, temperature, multipliers })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn qubits(&self) -> usize {
        self.multipliers.len()
    }

    fn multiplier(&self, q: usize) -> Result<f64> {
        self.multipliers
            .get(q)
            .copied()
            .ok_or_else(|| Error::Index(format!("qubit {q} outside 0..{}", self.multipliers.len())))
    }

    /// Σ_k over modes of `g_k^A g_k^B · term(ω_k)`.
    fn mode_sum<T>(&self, a: usize, b: usize, t: f64, term: impl Fn(f64, f64) -> T) -> Result<T>
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        if !(t >= 0.0) {
            return Err(domain(format!("time must be non-negative, got {t}")));
        }
        let scale = self.multiplier(a)? * self.multiplier(b)?;
        Ok(self
            .modes
            .iter()
            .map(|m| term(m.frequency, occupation(m.frequency, self.temperature)) * (scale * m.coupling * m.coupling))
            .sum())
    }
}

/// Bose–Einstein occupation; exactly zero at T = 0.
pub fn occupation(frequency: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (frequency / temperature).exp_m1()
    }
}

/// Dephasing correlation `C_AB(t) = 2 Σ_k g^A g^B (2n̄+1) sin(ω_k t)/ω_k`.
/// The full mode sum is used: only the zero-frequency channel of σ_z
/// survives for pure dephasing, so no mode is filtered out.
pub fn mode_correlation(bath: &ModeBath, a: usize, b: usize, t: f64) -> Result<f64> {
    bath.mode_sum(a, b, t, |w, nbar| 2.0 * (2.0 * nbar + 1.0) * (w * t).sin() / w)
}

/// Lamb-shift coefficient `F_AB(t) = Σ_k g^A g^B (cos ω_k t - 1)/ω_k`.
pub fn lamb_shift_coeff(bath: &ModeBath, a: usize, b: usize, t: f64) -> Result<f64> {
    bath.mode_sum(a, b, t, |w, _| ((w * t).cos() - 1.0) / w)
}

/// Spectral function `D_ij(t) = Σ_k g^i g^j [2n̄ sin(ω_k t)/ω_k + (1 - e^{-iω_k t})/(iω_k)]`.
pub fn spectral_function(bath: &ModeBath, i: usize, j: usize, t: f64) -> Result<Complex64> {
    bath.mode_sum(i, j, t, |w, nbar| {
        let thermal = Complex64::from(2.0 * nbar * (w * t).sin() / w);
        let vacuum = (Complex64::from(1.0) - Complex64::new(0.0, -w * t).exp()) / Complex64::new(0.0, w);
        thermal + vacuum
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn single(t_kelvin: f64) -> ModeBath {
        ModeBath::new(vec![BathMode { frequency: 1.0, coupling: 1.0 }], t_kelvin, vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_time_vanishes() {
        let bath = single(0.7);
        assert_eq!(mode_correlation(&bath, 0, 1, 0.0).unwrap(), 0.0);
        assert_eq!(lamb_shift_coeff(&bath, 0, 1, 0.0).unwrap(), 0.0);
        assert_eq!(spectral_function(&bath, 0, 1, 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_mode_hand_values() {
        let bath = single(0.0);
        assert!((mode_correlation(&bath, 0, 1, FRAC_PI_2).unwrap() - 2.0).abs() < 1e-15);
        assert!((lamb_shift_coeff(&bath, 0, 0, PI).unwrap() + 2.0).abs() < 1e-15);
        let d = spectral_function(&bath, 0, 0, FRAC_PI_2).unwrap();
        assert!((d - Complex64::new(1.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn occupation_at_zero_temperature_is_exact() {
        assert_eq!(occupation(0.3, 0.0), 0.0);
        assert!((occupation(1.0, 2.0) - 1.0 / (0.5f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn two_mode_thermal_matches_term_by_term() {
        let modes = vec![BathMode { frequency: 0.8, coupling: 0.3 }, BathMode { frequency: 2.5, coupling: -0.7 }];
        let bath = ModeBath::new(modes.clone(), 1.7, vec![1.0, 2.0]).unwrap();
        let t = 1.3;
        let mut expected = 0.0;
        for m in &modes {
            let nbar = 1.0 / ((m.frequency / 1.7).exp() - 1.0);
            expected += 2.0 * (1.0 * m.coupling) * (2.0 * m.coupling) * (2.0 * nbar + 1.0) * (m.frequency * t).sin()
                / m.frequency;
        }
        assert!((mode_correlation(&bath, 0, 1, t).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn empty_bath_is_zero_and_bad_input_rejected() {
        let bath = ModeBath::new(vec![], 1.0, vec![1.0]).unwrap();
        assert_eq!(mode_correlation(&bath, 0, 0, 3.0).unwrap(), 0.0);
        assert_eq!(lamb_shift_coeff(&bath, 0, 0, 3.0).unwrap(), 0.0);
        assert!(ModeBath::new(vec![BathMode { frequency: 0.0, coupling: 1.0 }], 0.0, vec![1.0]).is_err());
        assert!(mode_correlation(&single(0.0), 0, 2, 1.0).is_err());
    }

    fn bath_strategy() -> impl Strategy<Value = ModeBath> {
        (
            prop::collection::vec((0.05f64..20.0, -2.0f64..2.0), 0..12),
            0.0f64..5.0,
            prop::collection::vec(-3.0f64..3.0, 2..5),
        )
            .prop_map(|(modes, temp, mult)| {
                let modes = modes.into_iter().map(|(frequency, coupling)| BathMode { frequency, coupling }).collect();
                ModeBath::new(modes, temp, mult).unwrap()
            })
    }

    proptest! {
        #[test]
        fn spectral_function_decomposes(bath in bath_strategy(), t in 0.0f64..10.0, i in 0usize..2, j in 0usize..2) {
            let d = spectral_function(&bath, i, j, t).unwrap();
            let c = mode_correlation(&bath, i, j, t).unwrap();
            let f = lamb_shift_coeff(&bath, i, j, t).unwrap();
            let scale = 1.0 + c.abs() + f.abs();
            prop_assert!((d.re - 0.5 * c).abs() <= 1e-12 * scale);
            prop_assert!((d.im - f).abs() <= 1e-12 * scale);
        }
    }
}
