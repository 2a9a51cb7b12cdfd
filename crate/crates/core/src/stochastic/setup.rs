use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::noise::NoiseSpec;
use super::spectrum::calibrate_working_amplitude;
use crate::error::{domain, Result};

/// Which of the two engineered white-noise sets to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseRegime {
    /// 0.2 Hz base, 140 Hz cutoff.
    Markovian,
    /// 1 mHz base, 0.18 Hz cutoff.
    NonMarkovian,
}

impl NoiseRegime {
    pub fn preset(self, seed: u64) -> NoiseSpec {
        match self {
            Self::Markovian => NoiseSpec::markovian_preset(seed),
            Self::NonMarkovian => NoiseSpec::non_markovian_preset(seed),
        }
    }

    /// Time at which the calibrated superdecoherence factor reaches 1.
    pub fn calibration_time(self) -> f64 {
        match self {
            Self::Markovian => 1.0 / 32.0,
            Self::NonMarkovian => 1.0 / 8.0,
        }
    }
}

/// Resolved parameters of an engineered-noise Ramsey simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSetup {
    pub regime: NoiseRegime,
    pub spec: NoiseSpec,
    pub working: usize,
    /// Ω₀, rad/s.
    pub frequency: f64,
    /// ω_a, rad/s.
    pub aux_frequency: f64,
    pub times: Vec<f64>,
    pub calibration_time: f64,
}

pub const DEFAULT_WORKING: usize = 4;
pub const DEFAULT_FREQUENCY: f64 = TAU * 5.0;
pub const DEFAULT_GRID_STEP: f64 = 5e-3;
pub const DEFAULT_GRID_END: f64 = 1.0;

impl SimulationSetup {
    /// Defaults: N = 4, Ω₀ = 2π·5 rad/s, ω_a = 0, 5 ms grid over [0, 1] s,
    /// b₁ calibrated so that 2χ = 1 at the regime's calibration time.
    pub fn calibrated(regime: NoiseRegime, seed: u64) -> Result<Self> {
        let mut spec = regime.preset(seed);
        let calibration_time = regime.calibration_time();
        spec.working_amplitude = calibrate_working_amplitude(&spec, DEFAULT_WORKING, calibration_time, 1.0)?;
        Ok(Self {
            regime,
            spec,
            working: DEFAULT_WORKING,
            frequency: DEFAULT_FREQUENCY,
            aux_frequency: 0.0,
            times: uniform_grid(DEFAULT_GRID_STEP, DEFAULT_GRID_END)?,
            calibration_time,
        })
    }
}

/// `0, step, 2 step, …, end` with the point count rounded to the nearest
/// whole number of steps.
pub fn uniform_grid(step: f64, end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && end >= 0.0 && step.is_finite() && end.is_finite()) {
        return Err(domain(format!("grid needs step > 0 and end >= 0, got {step}, {end}")));
    }
    let count = (end / step).round() as usize;
    Ok((0..=count).map(|k| k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::analytic_chi;

    #[test]
    fn grid_has_201_points() {
        let g = uniform_grid(5e-3, 1.0).unwrap();
        assert_eq!(g.len(), 201);
        assert!((g[200] - 1.0).abs() < 1e-15);
        assert!(uniform_grid(0.0, 1.0).is_err());
    }

    #[test]
    fn calibrated_setups_hit_unit_factor() {
        for regime in [NoiseRegime::Markovian, NoiseRegime::NonMarkovian] {
            let s = SimulationSetup::calibrated(regime, 1).unwrap();
            let two_chi = 2.0 * analytic_chi(&s.spec, s.working, s.calibration_time);
            assert!((two_chi - 1.0).abs() < 1e-12);
        }
        let m = SimulationSetup::calibrated(NoiseRegime::Markovian, 1).unwrap();
        assert_eq!(m.spec.tones, 700);
        let nm = SimulationSetup::calibrated(NoiseRegime::NonMarkovian, 1).unwrap();
        assert_eq!(nm.spec.tones, 180);
    }
}
