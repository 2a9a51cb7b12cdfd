use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Single-qubit decoherence factor Γ(t) and its rate γ(t) = dΓ/dt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DephasingLaw {
    /// Γ(t) = α t.
    Markovian { alpha: f64 },
    /// Γ(t) = β t².
    NonMarkovian { beta: f64 },
    /// Γ sampled on a uniform grid starting at t = 0.
    Tabulated(TabulatedLaw),
}

impl DephasingLaw {
    pub fn markovian(alpha: f64) -> Result<Self> {
        check_rate(alpha, "alpha")?;
        Ok(Self::Markovian { alpha })
    }

    pub fn non_markovian(beta: f64) -> Result<Self> {
        check_rate(beta, "beta")?;
        Ok(Self::NonMarkovian { beta })
    }

    /// Γ(t).
    pub fn factor(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self {
            Self::Markovian { alpha } => alpha * t,
            Self::NonMarkovian { beta } => beta * t * t,
            Self::Tabulated(tab) => tab.factor(t)?,
        })
    }

    /// γ(t). Tabulated laws use the forward difference of the segment
    /// containing `t` (the last segment at the grid end).
    pub fn rate(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self {
            Self::Markovian { alpha } => *alpha,
            Self::NonMarkovian { beta } => 2.0 * beta * t,
            Self::Tabulated(tab) => tab.rate(t)?,
        })
    }

    /// Largest time at which the law can be evaluated.
    pub fn horizon(&self) -> f64 {
        match self {
            Self::Tabulated(tab) => tab.end(),
            _ => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Markovian { alpha } => check_rate(*alpha, "alpha"),
            Self::NonMarkovian { beta } => check_rate(*beta, "beta"),
            Self::Tabulated(tab) => TabulatedLaw::new(tab.step, tab.values.clone()).map(|_| ()),
        }
    }
}

/// Γ values on the grid `k * step`, `k = 0..values.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTabulated")]
pub struct TabulatedLaw {
    step: f64,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTabulated {
    step: f64,
    values: Vec<f64>,
}

impl TryFrom<RawTabulated> for TabulatedLaw {
    type Error = Error;

    fn try_from(raw: RawTabulated) -> Result<Self> {
        Self::new(raw.step, raw.values)
    }
}

impl TabulatedLaw {
    /// Requires Γ(0) = 0, a non-decreasing series and at least two samples.
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(domain(format!("tabulated step must be positive, got {step}")));
        }
        if values.len() < 2 {
            return Err(domain("tabulated law needs at least two samples"));
        }
        if values[0] != 0.0 {
            return Err(domain(format!("tabulated law must start at 0, got {}", values[0])));
        }
        if let Some(k) = values.windows(2).position(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
            return Err(domain(format!("tabulated law decreases or is not finite at sample {}", k + 1)));
        }
        Ok(Self { step, values })
    }

    /// Samples an arbitrary Γ on `samples` uniform points over `[0, end]`.
    pub fn sample(end: f64, samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if samples < 2 {
            return Err(domain("tabulated law needs at least two samples"));
        }
        let step = end / (samples - 1) as f64;
        Self::new(step, (0..samples).map(|k| f(k as f64 * step)).collect())
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    fn segment(&self, t: f64) -> Result<(usize, f64)> {
        let end = self.end();
        // tolerate round-off at the grid end
        if t > end * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::OutOfRange { t, end });
        }
        let pos = t / self.step;
        let k = (pos.floor() as usize).min(self.values.len() - 2);
        Ok((k, (pos - k as f64).clamp(0.0, 1.0)))
    }

    fn factor(&self, t: f64) -> Result<f64> {
        let (k, frac) = self.segment(t)?;
        Ok(self.values[k] + frac * (self.values[k + 1] - self.values[k]))
    }

    fn rate(&self, t: f64) -> Result<f64> {
        let (k, _) = self.segment(t)?;
        Ok((self.values[k + 1] - self.values[k]) / self.step)
    }
}

/// Γ(t) for the given law.
pub fn decoherence_factor(law: &DephasingLaw, t: f64) -> Result<f64> {
    law.factor(t)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("time must be non-negative, got {t}")))
    }
}

fn check_rate(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and non-negative, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_laws() {
        let m = DephasingLaw::markovian(1.0).unwrap();
        assert_eq!(m.factor(0.0).unwrap(), 0.0);
        assert_eq!(m.factor(0.5).unwrap(), 0.5);
        let nm = DephasingLaw::non_markovian(1.0).unwrap();
        assert_eq!(nm.factor(2.0).unwrap(), 4.0);
        assert_eq!(nm.rate(2.0).unwrap(), 4.0);
    }

    #[test]
    fn negative_time_is_domain_error() {
        let m = DephasingLaw::markovian(1.0).unwrap();
        assert!(matches!(m.factor(-1e-9), Err(Error::Domain(_))));
        assert!(matches!(m.rate(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let tab = TabulatedLaw::new(0.5, vec![0.0, 1.0, 1.5]).unwrap();
        let law = DephasingLaw::Tabulated(tab);
        assert_eq!(law.factor(0.25).unwrap(), 0.5);
        assert_eq!(law.factor(0.75).unwrap(), 1.25);
        assert_eq!(law.factor(1.0).unwrap(), 1.5);
        assert_eq!(law.rate(0.1).unwrap(), 2.0);
        assert_eq!(law.rate(1.0).unwrap(), 1.0);
        assert!(matches!(law.factor(1.01), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn tabulated_rejects_bad_series() {
        assert!(TabulatedLaw::new(0.1, vec![0.1, 0.2]).is_err());
        assert!(TabulatedLaw::new(0.1, vec![0.0, 0.2, 0.1]).is_err());
        assert!(TabulatedLaw::new(0.0, vec![0.0, 0.2]).is_err());
        assert!(TabulatedLaw::new(0.1, vec![0.0]).is_err());
    }

    #[test]
    fn tabulated_matches_sampled_quadratic() {
        let tab = TabulatedLaw::sample(1.0, 10_001, |t| t * t).unwrap();
        let law = DephasingLaw::Tabulated(tab);
        for &t in &[0.0, 0.1234, 0.5, 0.99] {
            assert!((law.factor(t).unwrap() - t * t).abs() < 1e-8);
            assert!((law.rate(t).unwrap() - 2.0 * t).abs() < 2e-4);
        }
    }

    #[test]
    fn tabulated_deserialization_validates() {
        let ok: DephasingLaw = serde_json::from_str(r#"{"kind":"tabulated","step":0.5,"values":[0,1,2]}"#).unwrap();
        assert_eq!(ok.factor(0.5).unwrap(), 1.0);
        let bad = serde_json::from_str::<DephasingLaw>(r#"{"kind":"tabulated","step":0.5,"values":[1,2]}"#);
        assert!(bad.is_err());
    }
}
