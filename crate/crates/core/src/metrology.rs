//! Closed-form Ramsey metrology: readout probability, Fisher information,
//! uncertainty, optimal interrogation time and precision ratios for GHZ
//! probes with and without one auxiliary qubit.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::dephasing::{BathTopology, DephasingLaw};
use crate::error::{domain, Error, Result};
use crate::optimize;

/// Auxiliary qubit: its frequency ω_a and coupling ratio K = g^a / g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxQubit {
    pub frequency: f64,
    pub coupling: f64,
}

/// `working` qubits at angular frequency Ω₀, plus an optional auxiliary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub working: usize,
    pub frequency: f64,
    pub aux: Option<AuxQubit>,
}

impl ProbeConfig {
    pub fn new(working: usize, frequency: f64, aux: Option<AuxQubit>) -> Result<Self> {
        if working == 0 {
            return Err(domain("probe needs at least one working qubit"));
        }
        if let Some(a) = aux {
            if !(a.coupling > 0.0) {
                return Err(domain(format!("auxiliary coupling ratio must be > 0, got {}", a.coupling)));
            }
        }
        Ok(Self { working, frequency, aux })
    }

    /// Total qubit count n (N + 1 with an auxiliary).
    pub fn resources(&self) -> usize {
        self.working + usize::from(self.aux.is_some())
    }

    /// Signal frequency N Ω₀ - ω_a of the GHZ branch pair (N Ω₀ without aux).
    pub fn detuning(&self) -> f64 {
        self.working as f64 * self.frequency - self.aux.map_or(0.0, |a| a.frequency)
    }
}

/// Total duration T and single-shot interrogation time t, `0 < t <= T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentBudget {
    pub total: f64,
    pub interrogation: f64,
}

impl ExperimentBudget {
    pub fn new(total: f64, interrogation: f64) -> Result<Self> {
        check_budget(total, interrogation)?;
        Ok(Self { total, interrogation })
    }

    pub fn repetitions(&self) -> f64 {
        self.total / self.interrogation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionResult {
    pub optimal_time: f64,
    pub variance: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// n-qubit GHZ probe.
    Entangled,
    /// n independent single-qubit probes.
    Unentangled,
    /// N = n - 1 working qubits in a GHZ state with one matched auxiliary.
    EntangledWithAux,
}

/// How many repetitions the budget T buys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceMode {
    /// n T / t repetitions: every qubit is an independent shot.
    PerQubitRepetitions,
    /// T / t repetitions of one (possibly entangled) probe.
    PerShotRepetitions,
}

/// `P = ½[1 + cos(nφt) e^{-Γ_n}]`.
pub fn ghz_probability(n: usize, phi: f64, t: f64, decay: f64) -> f64 {
    0.5 * (1.0 + (n as f64 * phi * t).cos() * (-decay).exp())
}

/// `∂P/∂φ` of [`ghz_probability`].
pub fn ghz_probability_derivative(n: usize, phi: f64, t: f64, decay: f64) -> f64 {
    let nt = n as f64 * t;
    -0.5 * nt * (nt * phi).sin() * (-decay).exp()
}

/// Readout of the auxiliary scheme: `P = ½[1 + cos((NΩ₀ - ω_a) t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxReadout {
    pub probability: f64,
    /// Zero detuning: the readout carries no information about Ω₀.
    pub degenerate: bool,
}

pub fn aux_probability(working: usize, frequency: f64, aux_frequency: f64, t: f64) -> AuxReadout {
    let detuning = working as f64 * frequency - aux_frequency;
    AuxReadout { probability: 0.5 * (1.0 + (detuning * t).cos()), degenerate: detuning == 0.0 }
}

/// `F = (∂P/∂φ)² / [P(1 - P)]`.
pub fn fisher_information(p: f64, dp_dphi: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::SingularProbability(p));
    }
    Ok(dp_dphi * dp_dphi / (p * (1.0 - p)))
}

/// Closed form `n²t² sin²(nφt) e^{-2Γ} / [1 - cos²(nφt) e^{-2Γ}]`.
pub fn ghz_fisher_information(n: usize, phi: f64, t: f64, decay: f64) -> Result<f64> {
    let nt = n as f64 * t;
    let (s, c) = (nt * phi).sin_cos();
    let e2 = (-2.0 * decay).exp();
    let denom = 1.0 - c * c * e2;
    if !(denom > 0.0) {
        return Err(Error::SingularProbability(ghz_probability(n, phi, t, decay)));
    }
    Ok(nt * nt * s * s * e2 / denom)
}

/// Variance of the estimate from Fisher information `fisher` per shot.
pub fn uncertainty(fisher: f64, n: usize, total: f64, t: f64, mode: ResourceMode) -> Result<f64> {
    if !(fisher > 0.0) {
        return Err(domain(format!("Fisher information must be positive, got {fisher}")));
    }
    check_budget(total, t)?;
    let shots = match mode {
        ResourceMode::PerQubitRepetitions => n as f64 * total / t,
        ResourceMode::PerShotRepetitions => total / t,
    };
    Ok(1.0 / (shots * fisher))
}

/// Multiplier c with collective decay `c Γ(t)` for the scheme's probe.
pub fn decay_multiplier(topology: &BathTopology, n: usize, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Entangled => topology.pair_sum(n),
        Scheme::Unentangled => 1.0,
        Scheme::EntangledWithAux => 0.0,
    }
}

/// Phase-optimised variance at interrogation time `t` (the working point
/// sits where the readout slope is maximal, so only the decay envelope
/// remains):
///
/// * entangled: GHZ Fisher information `n²t²e^{-2cΓ}` over `T/t` shots,
///   giving `e^{2cΓ(t)} / (n² T t)`;
/// * unentangled: `t²e^{-2Γ}` over `nT/t` shots, giving `e^{2Γ(t)} / (n T t)`;
/// * auxiliary scheme: noise cancelled, `1 / (N² T t)` with `N = n - 1`.
pub fn envelope_variance(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    scheme: Scheme,
    total: f64,
    t: f64,
) -> Result<f64> {
    check_budget(total, t)?;
    let decay = decay_multiplier(topology, n, scheme) * law.factor(t)?;
    match scheme {
        Scheme::Entangled => {
            let nt = n as f64 * t;
            uncertainty(nt * nt * (-2.0 * decay).exp(), n, total, t, ResourceMode::PerShotRepetitions)
        }
        Scheme::Unentangled => {
            uncertainty(t * t * (-2.0 * decay).exp(), n, total, t, ResourceMode::PerQubitRepetitions)
        }
        Scheme::EntangledWithAux => {
            let working = aux_working_count(n)?;
            aux_scheme_uncertainty(working, total, t)
        }
    }
}

/// Full phase-dependent variance at parameter value `phi`: the envelope
/// counterpart is [`envelope_variance`]. Infinite where the readout slope
/// vanishes.
pub fn variance_at(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    scheme: Scheme,
    phi: f64,
    total: f64,
    t: f64,
) -> Result<f64> {
    check_budget(total, t)?;
    let decay = decay_multiplier(topology, n, scheme) * law.factor(t)?;
    let (qubits, mode) = match scheme {
        Scheme::Entangled => (n, ResourceMode::PerShotRepetitions),
        Scheme::Unentangled => (1, ResourceMode::PerQubitRepetitions),
        Scheme::EntangledWithAux => (aux_working_count(n)?, ResourceMode::PerShotRepetitions),
    };
    let fisher = match ghz_fisher_information(qubits, phi, t, decay) {
        Ok(f) => f,
        Err(Error::SingularProbability(_)) => 0.0,
        Err(e) => return Err(e),
    };
    if fisher == 0.0 {
        return Ok(f64::INFINITY);
    }
    uncertainty(fisher, n, total, t, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMethod {
    ClosedForm,
    Numeric,
    PhaseCondition,
}

/// Optimal interrogation time. `envelope` minimises the decay envelope
/// (stationarity condition); `phase_matched` is the nearest time where the
/// accumulated phase is an odd multiple of π/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalTime {
    pub envelope: f64,
    pub phase_matched: f64,
    pub method: TimeMethod,
}

/// Minimiser of the variance over `(0, total]`.
///
/// `phi` is the angular rate of the estimated parameter; for
/// [`Scheme::EntangledWithAux`] it is the detuning `NΩ₀ - ω_a`. Analytic
/// laws use closed forms of `2 c t γ(t) = 1`; tabulated laws are minimised
/// numerically.
pub fn optimal_time(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    phi: f64,
    scheme: Scheme,
    total: f64,
) -> Result<OptimalTime> {
    if n == 0 {
        return Err(domain("need n >= 1"));
    }
    if phi == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    topology.validate()?;
    let phase_rate = match scheme {
        Scheme::Entangled => n as f64 * phi,
        Scheme::Unentangled | Scheme::EntangledWithAux => phi,
    }
    .abs();
    if scheme == Scheme::EntangledWithAux {
        aux_working_count(n)?;
        let t = FRAC_PI_2 / phase_rate;
        if t > total {
            return Err(Error::OptimizationFailed(format!(
                "first phase-matched time {t:.6e} s exceeds the budget {total} s"
            )));
        }
        return Ok(OptimalTime { envelope: t, phase_matched: t, method: TimeMethod::PhaseCondition });
    }

    let c = decay_multiplier(topology, n, scheme);
    let (envelope, method) = match *law {
        DephasingLaw::Markovian { alpha } => (1.0 / (2.0 * c * alpha), TimeMethod::ClosedForm),
        DephasingLaw::NonMarkovian { beta } => (1.0 / (2.0 * (c * beta).sqrt()), TimeMethod::ClosedForm),
        DephasingLaw::Tabulated(_) => (numeric_optimal_time(law, topology, n, scheme, total)?, TimeMethod::Numeric),
    };
    if !(envelope > 0.0 && envelope <= total) {
        return Err(Error::OptimizationFailed(format!(
            "stationary point t = {envelope:.6e} s lies outside (0, {total}]"
        )));
    }
    Ok(OptimalTime { envelope, phase_matched: nearest_odd_quarter_period(phase_rate, envelope), method })
}

/// Numeric minimiser of [`envelope_variance`] over `(0, total]`.
pub fn numeric_optimal_time(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    scheme: Scheme,
    total: f64,
) -> Result<f64> {
    let upper = total.min(law.horizon());
    let objective = |t: f64| envelope_variance(law, topology, n, scheme, total, t).unwrap_or(f64::INFINITY);
    // log of the variance keeps the bracket well scaled across decades
    optimize::minimize_log_bracketed(|t| objective(t).ln(), upper, 64, 6.0).map(|m| m.x)
}

fn nearest_odd_quarter_period(phase_rate: f64, near: f64) -> f64 {
    let quarters = near * phase_rate / FRAC_PI_2;
    let k = (2.0 * ((quarters - 1.0) / 2.0).round() + 1.0).max(1.0);
    k * FRAC_PI_2 / phase_rate
}

/// Entangled/unentangled comparison `r = δφ_u / δφ_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub entangled_time: f64,
    pub unentangled_time: f64,
}

/// `r` from this module's own optimal times and variances.
pub fn precision_ratio(law: &DephasingLaw, topology: &BathTopology, n: usize, total: f64) -> Result<RatioReport> {
    if n < 2 {
        return Err(domain("precision ratio needs n >= 2"));
    }
    // the ratio does not depend on φ; any non-zero rate gives the envelope optimum
    let te = optimal_time(law, topology, n, 1.0, Scheme::Entangled, total)?.envelope;
    let tu = optimal_time(law, topology, n, 1.0, Scheme::Unentangled, total)?.envelope;
    ratio_at(law, topology, n, total, te, tu)
}

/// Same ratio with both optimal times found by numeric minimisation.
pub fn precision_ratio_numeric(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    total: f64,
) -> Result<RatioReport> {
    if n < 2 {
        return Err(domain("precision ratio needs n >= 2"));
    }
    let te = numeric_optimal_time(law, topology, n, Scheme::Entangled, total)?;
    let tu = numeric_optimal_time(law, topology, n, Scheme::Unentangled, total)?;
    ratio_at(law, topology, n, total, te, tu)
}

fn ratio_at(
    law: &DephasingLaw,
    topology: &BathTopology,
    n: usize,
    total: f64,
    te: f64,
    tu: f64,
) -> Result<RatioReport> {
    let ve = envelope_variance(law, topology, n, Scheme::Entangled, total, te)?;
    let vu = envelope_variance(law, topology, n, Scheme::Unentangled, total, tu)?;
    Ok(RatioReport { ratio: (vu / ve).sqrt(), entangled_time: te, unentangled_time: tu })
}

/// `r² = n (t_e/t_u) exp[2Γ(t_u) - 2cΓ(t_e)]`, evaluated directly.
pub fn ratio_formula(law: &DephasingLaw, topology: &BathTopology, n: usize, te: f64, tu: f64) -> Result<f64> {
    let c = topology.pair_sum(n);
    let r2 = n as f64 * (te / tu) * (2.0 * law.factor(tu)? - 2.0 * c * law.factor(te)?).exp();
    Ok(r2.sqrt())
}

/// Exponent p of the published `r = n^p` entry for the (law, bath) cell of
/// the four-cell comparison table. Used only to report discrepancies.
pub fn published_ratio_exponent(markovian: bool, correlated: bool) -> f64 {
    match (markovian, correlated) {
        (true, false) => 0.0,
        (true, true) => -0.5,
        (false, false) => 0.5,
        (false, true) => 0.0,
    }
}

/// `δω₀² = 1/(N² T t)` for N working qubits with a matched auxiliary.
pub fn aux_scheme_uncertainty(working: usize, total: f64, t: f64) -> Result<f64> {
    if working == 0 {
        return Err(domain("need N >= 1 working qubits"));
    }
    check_budget(total, t)?;
    Ok(1.0 / ((working * working) as f64 * total * t))
}

/// `δω₀² = 2/(n T t)`: n qubits split into n/2 probe/auxiliary pairs.
pub fn unentangled_aux_uncertainty(n: usize, total: f64, t: f64) -> Result<f64> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Pairing(n));
    }
    check_budget(total, t)?;
    Ok(2.0 / (n as f64 * total * t))
}

/// `δB² = 1/[(Nγ₀ - γ_a)² T t]`.
pub fn field_sensing_uncertainty(working: usize, gamma0: f64, gamma_a: f64, total: f64, t: f64) -> Result<f64> {
    let rate = working as f64 * gamma0 - gamma_a;
    if rate == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    check_budget(total, t)?;
    Ok(1.0 / (rate * rate * total * t))
}

/// Interrogation time with `(Nγ₀ - γ_a) B t = kπ/2`, `k` odd.
pub fn field_optimal_time(working: usize, gamma0: f64, gamma_a: f64, field: f64, k: u32) -> Result<f64> {
    let rate = (working as f64 * gamma0 - gamma_a) * field;
    if rate == 0.0 {
        return Err(Error::DegenerateDetuning);
    }
    if k.is_multiple_of(2) {
        return Err(domain(format!("phase condition needs odd k, got {k}")));
    }
    Ok(k as f64 * FRAC_PI_2 / rate.abs())
}

fn aux_working_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(domain("auxiliary scheme needs n >= 2 qubits"));
    }
    Ok(n - 1)
}

fn check_budget(total: f64, t: f64) -> Result<()> {
    if t > 0.0 && t <= total && total.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("need 0 < t <= T, got t = {t}, T = {total}")))
    }
}
