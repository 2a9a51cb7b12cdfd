use serde::Serialize;

use super::ensemble::EnsembleResult;
use crate::error::{domain, Result};

/// Coherence floor in units of its standard error.
pub const NOISE_FLOOR_SIGMAS: f64 = 5.0;

/// Estimated decoherence factor `Γ̂(t) = -ln|⟨e^{2iφ_B}⟩|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceEstimate {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Grid index where the coherence first fell below the noise floor;
    /// the series stops there.
    pub truncated_at: Option<usize>,
}

/// Extracts Γ̂ from the modulus of the ensemble coherence, so the control
/// phase φ_A (and the zeros of cos 2φ_A) never enters. In the Gaussian
/// limit Γ̂ = 2χ.
pub fn fit_decoherence_factor(ensemble: &EnsembleResult) -> DecoherenceEstimate {
    let mut est = DecoherenceEstimate { times: Vec::new(), gamma: Vec::new(), truncated_at: None };
    for k in 0..ensemble.len() {
        let (modulus, se) = ensemble.coherence(k);
        if modulus <= 0.0 || modulus < NOISE_FLOOR_SIGMAS * se {
            est.truncated_at = Some(k);
            break;
        }
        est.times.push(ensemble.times[k]);
        // clamp the rounding of a perfectly coherent ensemble to zero
        est.gamma.push((-modulus.ln()).max(0.0));
    }
    est
}

/// Least-squares fit of `y = C t^p` on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
}

/// Fits the positive samples with `t_min <= t <= t_max`.
pub fn fit_power_law(times: &[f64], values: &[f64], t_min: f64, t_max: f64) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, y)| **t >= t_min && **t <= t_max && **t > 0.0 && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(domain(format!(
            "power-law fit needs 3 positive samples in [{t_min}, {t_max}], found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    Ok(PowerLawFit { exponent, prefactor: (my - exponent * mx).exp(), points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let t: Vec<f64> = (1..40).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(1.7)).collect();
        let fit = fit_power_law(&t, &y, 0.0, 1.0).unwrap();
        assert!((fit.exponent - 1.7).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-10);
        assert!(fit_power_law(&t, &y, 0.5, 1.0).is_err());
    }

    #[test]
    fn truncates_below_noise_floor() {
        let e = EnsembleResult {
            times: vec![0.0, 0.1, 0.2, 0.3],
            mean_cos: vec![1.0, 0.5, 0.01, 0.4],
            mean_sin: vec![0.0; 4],
            probability: vec![0.5; 4],
            stderr: vec![0.0; 4],
            stderr_cos: vec![0.0, 0.01, 0.01, 0.01],
            stderr_sin: vec![0.0; 4],
            realizations: 100,
        };
        let est = fit_decoherence_factor(&e);
        assert_eq!(est.truncated_at, Some(2));
        assert_eq!(est.gamma.len(), 2);
        assert_eq!(est.gamma[0], 0.0);
        assert!((est.gamma[1] - 2f64.ln()).abs() < 1e-15);
    }
}
