use serde::{Deserialize, Serialize};

use super::law::DephasingLaw;
use crate::error::{domain, Result};

/// Spatial correlation structure of the bath seen by a linear qubit array.
///
/// Working qubits sit at positions `1..=N`; the auxiliary qubit, when
/// present, sits at position `N + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathTopology {
    Uncorrelated,
    FullyCorrelated,
    /// Correlations fall off as `exp(-x |i - j|)` with `x = d / ξ`.
    PartiallyCorrelated {
        x: f64,
    },
}

impl BathTopology {
    pub fn partial(x: f64) -> Result<Self> {
        let t = Self::PartiallyCorrelated { x };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PartiallyCorrelated { x } if !(x >= 0.0) => {
                Err(domain(format!("correlation ratio x must be >= 0, got {x}")))
            }
            _ => Ok(()),
        }
    }

    /// Normalised correlation between positions separated by `distance`.
    pub fn correlation_at(&self, distance: usize) -> f64 {
        if distance == 0 {
            return 1.0;
        }
        match *self {
            Self::Uncorrelated => 0.0,
            Self::FullyCorrelated => 1.0,
            Self::PartiallyCorrelated { x } => (-x * distance as f64).exp(),
        }
    }

    /// `b = Σ_{i,j=1..m} c(|i-j|)`: the collective-rate multiplier of `m`
    /// qubits. Equals `m` uncorrelated and `m²` fully correlated.
    pub fn pair_sum(&self, m: usize) -> f64 {
        match *self {
            Self::Uncorrelated => m as f64,
            Self::FullyCorrelated => (m * m) as f64,
            Self::PartiallyCorrelated { .. } => {
                // m terms at distance 0, 2(m - d) at distance d
                (1..m).fold(m as f64, |acc, d| acc + 2.0 * (m - d) as f64 * self.correlation_at(d))
            }
        }
    }

    /// `a = Σ_{i=1..m} c(N + 1 - i)`: summed working/auxiliary correlation
    /// for an array of `working` qubits, taken over the first `m` positions.
    pub fn aux_sum(&self, working: usize, m: usize) -> f64 {
        (1..=m).map(|i| self.correlation_at(working + 1 - i)).sum()
    }
}

/// Which index range the partial-correlation sums `a` and `b` run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRange {
    /// `i, j = 1..N`, the working qubits only.
    #[default]
    WorkingQubits,
    /// `i, j = 1..N+1`, including the auxiliary position.
    AllQubits,
}

/// Sums entering the coherence factor `A = (K - a)² + b - a²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSums {
    pub a: f64,
    pub b: f64,
}

impl CorrelationSums {
    pub fn new(topology: &BathTopology, working: usize, range: SumRange) -> Self {
        let m = match range {
            SumRange::WorkingQubits => working,
            SumRange::AllQubits => working + 1,
        };
        Self { a: topology.aux_sum(working, m), b: topology.pair_sum(m) }
    }

    pub fn factor(&self, coupling: f64) -> f64 {
        (coupling - self.a).powi(2) + self.b - self.a * self.a
    }
}

/// Qubit label: working qubits are 1-based positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitId {
    Working(usize),
    Aux,
}

/// Correlation kernel `C(A, B, t) = κ_AB γ(t)` for working qubits and an
/// optional auxiliary qubit with coupling ratio `K = g^a / g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationKernel {
    pub law: DephasingLaw,
    pub topology: BathTopology,
    pub working: usize,
    pub aux_coupling: Option<f64>,
}

impl CorrelationKernel {
    pub fn new(law: DephasingLaw, topology: BathTopology, working: usize, aux_coupling: Option<f64>) -> Result<Self> {
        if working == 0 {
            return Err(domain("kernel needs at least one working qubit"));
        }
        topology.validate()?;
        law.validate()?;
        if let Some(k) = aux_coupling {
            if !k.is_finite() {
                return Err(domain(format!("auxiliary coupling must be finite, got {k}")));
            }
        }
        Ok(Self { law, topology, working, aux_coupling })
    }

    fn position(&self, q: QubitId) -> Result<usize> {
        match q {
            QubitId::Working(i) if (1..=self.working).contains(&i) => Ok(i),
            QubitId::Working(i) => Err(crate::Error::Index(format!("working qubit {i} outside 1..={}", self.working))),
            QubitId::Aux if self.aux_coupling.is_some() => Ok(self.working + 1),
            QubitId::Aux => Err(crate::Error::Index("kernel has no auxiliary qubit".into())),
        }
    }

    /// Time-independent structure factor κ_AB.
    pub fn structure(&self, a: QubitId, b: QubitId) -> Result<f64> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        let k = self.aux_coupling.unwrap_or(0.0);
        let scale = match (a, b) {
            (QubitId::Aux, QubitId::Aux) => k * k,
            (QubitId::Aux, _) | (_, QubitId::Aux) => k,
            _ => 1.0,
        };
        Ok(scale * self.topology.correlation_at(pa.abs_diff(pb)))
    }

    pub fn value(&self, a: QubitId, b: QubitId, t: f64) -> Result<f64> {
        Ok(self.structure(a, b)? * self.law.rate(t)?)
    }

    /// Qubits in register order: auxiliary first, then working 1..N.
    pub fn qubits(&self) -> Vec<QubitId> {
        let mut q = Vec::with_capacity(self.working + 1);
        if self.aux_coupling.is_some() {
            q.push(QubitId::Aux);
        }
        q.extend((1..=self.working).map(QubitId::Working));
        q
    }
}

/// Collective decoherence factor Γ_n(t) = b(n) Γ(t) of an n-qubit GHZ probe.
pub fn collective_factor(law: &DephasingLaw, topology: &BathTopology, n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("collective factor needs n >= 1"));
    }
    topology.validate()?;
    Ok(topology.pair_sum(n) * law.factor(t)?)
}

/// `A(N, x) = (K - a)² + b - a²` with sums over the working qubits.
pub fn partial_corr_factor(working: usize, x: f64, coupling: f64) -> Result<f64> {
    partial_corr_factor_with_range(working, x, coupling, SumRange::WorkingQubits)
}

pub fn partial_corr_factor_with_range(working: usize, x: f64, coupling: f64, range: SumRange) -> Result<f64> {
    if working == 0 {
        return Err(domain("partial correlation needs N >= 1"));
    }
    let topology = BathTopology::partial(x)?;
    Ok(CorrelationSums::new(&topology, working, range).factor(coupling))
}

/// Optimal auxiliary coupling and the resulting minimal coherence factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxOptimum {
    pub coupling: f64,
    pub factor: f64,
}

/// `K* = a` minimises the quadratic `A(K)`, leaving `A_min = b - a²`.
pub fn optimal_aux_coupling(working: usize, x: f64) -> Result<AuxOptimum> {
    if working == 0 {
        return Err(domain("partial correlation needs N >= 1"));
    }
    let topology = BathTopology::partial(x)?;
    let sums = CorrelationSums::new(&topology, working, SumRange::WorkingQubits);
    Ok(AuxOptimum { coupling: sums.a, factor: sums.b - sums.a * sums.a })
}
