//! Pure-dephasing master-equation oracle.
//!
//! Integrates
//! `ρ̇ = i[ρ, H_S + H_LS] + ½ Σ_AB C_AB(t) (σ_z^B ρ σ_z^A - ½{σ_z^A σ_z^B, ρ})`
//! in the σ_z product basis. Every operator is diagonal there, so each
//! element evolves on its own: `ρ̇_mn = [i(E_n - E_m) - Λ_mn(t)] ρ_mn` with
//! `Λ_mn = ¼ Σ_AB C_AB (s_A^m - s_A^n)(s_B^m - s_B^n)`.
//!
//! Register order is auxiliary first (when present), then working qubits
//! 1..N; basis strings list bits in that order and `σ_z|0⟩ = +|0⟩`.

use num_complex::Complex64;

use crate::dephasing::{lamb_shift_coeff, mode_correlation, CorrelationKernel, ModeBath, QubitId};
use crate::error::{domain, Error, Result};

/// Largest tolerated step-halving discrepancy per step.
pub const LOCAL_ERROR_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|` for a normalised state vector of length `2^qubits`.
    pub fn from_state(qubits: usize, amplitudes: &[Complex64]) -> Result<Self> {
        let dim = 1usize << qubits;
        if amplitudes.len() != dim {
            return Err(domain(format!("state has {} amplitudes, expected {dim}", amplitudes.len())));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for m in 0..dim {
            for n in 0..dim {
                data[m * dim + n] = amplitudes[m] * amplitudes[n].conj();
            }
        }
        let rho = Self { qubits, data };
        rho.check()?;
        Ok(rho)
    }

    /// Equal superposition of two basis strings.
    pub fn cat(first: &str, second: &str) -> Result<Self> {
        if first.len() != second.len() || first == second {
            return Err(Error::Index(format!("need two distinct strings of equal length: {first}, {second}")));
        }
        let qubits = first.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[basis_index(qubits, first)?] = amp;
        amps[basis_index(qubits, second)?] = amp;
        Self::from_state(qubits, &amps)
    }

    /// `(|1⟩_a|0…0⟩ + |0⟩_a|1…1⟩)/√2` for `working` qubits plus the auxiliary.
    pub fn ghz_with_aux(working: usize) -> Result<Self> {
        let (one, two) = aux_pair_strings(working);
        Self::cat(&two, &one)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n: usize) -> Result<Self> {
        Self::cat(&"0".repeat(n), &"1".repeat(n))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim() + n]
    }

    pub fn element(&self, bra: &str, ket: &str) -> Result<Complex64> {
        Ok(self.get(basis_index(self.qubits, bra)?, basis_index(self.qubits, ket)?))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    /// max |ρ - ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for m in 0..dim {
            for n in m..dim {
                worst = worst.max((self.get(m, n) - self.get(n, m).conj()).norm());
            }
        }
        worst
    }

    /// Hermitian to 1e-12, unit trace to 1e-10, real diagonal in [0, 1].
    pub fn check(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm >= 1e-12 {
            return Err(domain(format!("density matrix is not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(domain(format!("density matrix trace is {tr}")));
        }
        for k in 0..self.dim() {
            let d = self.get(k, k);
            if d.im.abs() > 1e-10 || d.re < -1e-10 || d.re > 1.0 + 1e-10 {
                return Err(domain(format!("diagonal entry {k} is {d}")));
            }
        }
        Ok(())
    }
}

/// `(|1⟩, |2⟩) = (|0_a⟩|1…1⟩, |1_a⟩|0…0⟩)` as basis strings.
pub fn aux_pair_strings(working: usize) -> (String, String) {
    (format!("0{}", "1".repeat(working)), format!("1{}", "0".repeat(working)))
}

/// Index of a basis string; the first character is the most significant bit.
pub fn basis_index(qubits: usize, bits: &str) -> Result<usize> {
    if bits.len() != qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Index(format!("basis string {bits:?} does not address {qubits} qubits")));
    }
    Ok(bits.bytes().fold(0, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

/// σ_z eigenvalue of register position `p` in basis state `index`.
fn sigma(qubits: usize, index: usize, p: usize) -> f64 {
    if (index >> (qubits - 1 - p)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Source of the dephasing correlations.
#[derive(Debug, Clone, PartialEq)]
pub enum Couplings {
    /// `C_AB = κ_AB γ(t)` from a decoherence law and bath topology.
    Kernel(CorrelationKernel),
    /// Mode sums of a discrete bath; multipliers are ordered working 1..N,
    /// then the auxiliary.
    Modes(ModeBath),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingGenerator {
    couplings: Couplings,
    working: usize,
    working_frequency: f64,
    aux_frequency: Option<f64>,
    lamb_shift: bool,
}

impl DephasingGenerator {
    /// Kernel-driven generator. The register carries an auxiliary qubit iff
    /// the kernel has an auxiliary coupling; `aux_frequency` is ω_a.
    pub fn from_kernel(kernel: CorrelationKernel, working_frequency: f64, aux_frequency: f64) -> Self {
        let working = kernel.working;
        let aux = kernel.aux_coupling.map(|_| aux_frequency);
        Self { couplings: Couplings::Kernel(kernel), working, working_frequency, aux_frequency: aux, lamb_shift: false }
    }

    /// Mode-bath generator; `aux_frequency` adds an auxiliary qubit that
    /// uses the last multiplier of the bath.
    pub fn from_modes(
        bath: ModeBath,
        working: usize,
        working_frequency: f64,
        aux_frequency: Option<f64>,
    ) -> Result<Self> {
        let expected = working + usize::from(aux_frequency.is_some());
        if working == 0 || bath.qubits() != expected {
            return Err(domain(format!("bath has {} coupling multipliers, register needs {expected}", bath.qubits())));
        }
        Ok(Self { couplings: Couplings::Modes(bath), working, working_frequency, aux_frequency, lamb_shift: false })
    }

    /// Includes `H_LS = Σ_AB F_AB σ_z^A σ_z^B` (mode baths only).
    pub fn with_lamb_shift(mut self, on: bool) -> Self {
        self.lamb_shift = on;
        self
    }

    pub fn qubits(&self) -> usize {
        self.working + usize::from(self.aux_frequency.is_some())
    }

    fn has_aux(&self) -> bool {
        self.aux_frequency.is_some()
    }

    fn register(&self) -> Vec<QubitId> {
        let mut q = Vec::with_capacity(self.qubits());
        if self.has_aux() {
            q.push(QubitId::Aux);
        }
        q.extend((1..=self.working).map(QubitId::Working));
        q
    }

    fn frequency(&self, q: QubitId) -> f64 {
        match q {
            QubitId::Aux => self.aux_frequency.unwrap_or(0.0),
            QubitId::Working(_) => self.working_frequency,
        }
    }

    fn mode_index(&self, q: QubitId) -> usize {
        match q {
            QubitId::Working(i) => i - 1,
            QubitId::Aux => self.working,
        }
    }

    /// Correlation matrix C and Lamb matrix F over register positions at `t`.
    fn matrices(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let reg = self.register();
        let q = reg.len();
        let mut c = vec![0.0; q * q];
        let mut f = vec![0.0; q * q];
        for (p, &a) in reg.iter().enumerate() {
            for (r, &b) in reg.iter().enumerate() {
                match &self.couplings {
                    Couplings::Kernel(k) => c[p * q + r] = k.value(a, b, t)?,
                    Couplings::Modes(bath) => {
                        let (ia, ib) = (self.mode_index(a), self.mode_index(b));
                        c[p * q + r] = mode_correlation(bath, ia, ib, t)?;
                        if self.lamb_shift {
                            f[p * q + r] = lamb_shift_coeff(bath, ia, ib, t)?;
                        }
                    }
                }
            }
        }
        Ok((c, f))
    }

    /// Complex rate `i(E_n - E_m) - Λ_mn(t)` of every element, row-major.
    pub fn rates(&self, t: f64) -> Result<Vec<Complex64>> {
        let reg = self.register();
        let q = reg.len();
        let dim = 1usize << q;
        let (c, f) = self.matrices(t)?;
        let energy = |idx: usize| -> f64 {
            let mut e = 0.0;
            for (p, &a) in reg.iter().enumerate() {
                let sp = sigma(q, idx, p);
                e += 0.5 * self.frequency(a) * sp;
                if self.lamb_shift {
                    for r in 0..q {
                        e += f[p * q + r] * sp * sigma(q, idx, r);
                    }
                }
            }
            e
        };
        let energies: Vec<f64> = (0..dim).map(energy).collect();
        let mut out = Vec::with_capacity(dim * dim);
        let mut delta = vec![0.0; q];
        for m in 0..dim {
            for n in 0..dim {
                for (p, d) in delta.iter_mut().enumerate() {
                    *d = sigma(q, m, p) - sigma(q, n, p);
                }
                let mut lambda = 0.0;
                for p in 0..q {
                    if delta[p] == 0.0 {
                        continue;
                    }
                    for r in 0..q {
                        lambda += c[p * q + r] * delta[p] * delta[r];
                    }
                }
                out.push(Complex64::new(-0.25 * lambda, energies[n] - energies[m]));
            }
        }
        Ok(out)
    }
}

fn rk4_step(y: &[Complex64], h: f64, r0: &[Complex64], rmid: &[Complex64], r1: &[Complex64], out: &mut [Complex64]) {
    for k in 0..y.len() {
        let k1 = r0[k] * y[k];
        let k2 = rmid[k] * (y[k] + k1 * (0.5 * h));
        let k3 = rmid[k] * (y[k] + k2 * (0.5 * h));
        let k4 = r1[k] * (y[k] + k3 * h);
        out[k] = y[k] + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
}

/// Fixed-step classical RK4 from `ρ(0) = rho0`, returning ρ at each time of
/// `times`. Each step is checked against two half steps; the half-step
/// result is kept and a discrepancy above [`LOCAL_ERROR_LIMIT`] is an error.
pub fn integrate(
    generator: &DephasingGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    step: f64,
) -> Result<Vec<DensityMatrix>> {
    if rho0.qubits() != generator.qubits() {
        return Err(domain(format!("state has {} qubits, generator acts on {}", rho0.qubits(), generator.qubits())));
    }
    rho0.check()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("time grid must be non-negative and strictly ascending"));
    }
    if let Some(min_gap) = times.windows(2).map(|w| w[1] - w[0]).min_by(f64::total_cmp) {
        if step > min_gap * (1.0 + 1e-12) {
            return Err(domain(format!("step {step} exceeds the smallest grid spacing {min_gap}")));
        }
    }

    let mut y = rho0.data.clone();
    let mut full = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut half = full.clone();
    let mut fine = full.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let substeps = (span / step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / substeps as f64;
            for s in 0..substeps {
                let t0 = t + s as f64 * h;
                let r = [
                    generator.rates(t0)?,
                    generator.rates(t0 + 0.25 * h)?,
                    generator.rates(t0 + 0.5 * h)?,
                    generator.rates(t0 + 0.75 * h)?,
                    generator.rates(t0 + h)?,
                ];
                rk4_step(&y, h, &r[0], &r[2], &r[4], &mut full);
                rk4_step(&y, 0.5 * h, &r[0], &r[1], &r[2], &mut half);
                rk4_step(&half, 0.5 * h, &r[2], &r[3], &r[4], &mut fine);
                let estimate = full.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                if estimate > LOCAL_ERROR_LIMIT {
                    return Err(Error::StepSize { t: t0, estimate, limit: LOCAL_ERROR_LIMIT });
                }
                std::mem::swap(&mut y, &mut fine);
            }
            t = target;
        }
        let rho = DensityMatrix { qubits: rho0.qubits, data: y.clone() };
        rho.check()?;
        out.push(rho);
    }
    Ok(out)
}

/// `⟨bra|ρ(t)|ket⟩` along an integrated trajectory.
pub fn offdiagonal_trace(states: &[DensityMatrix], bra: &str, ket: &str) -> Result<Vec<Complex64>> {
    states.iter().map(|rho| rho.element(bra, ket)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::{optimal_aux_coupling, partial_corr_factor, BathMode, BathTopology, DephasingLaw};
    use std::f64::consts::TAU;

    fn grid(n: usize, end: f64) -> Vec<f64> {
        (0..=n).map(|k| k as f64 * end / n as f64).collect()
    }

    fn kernel(law: DephasingLaw, topo: BathTopology, n: usize, k: Option<f64>) -> CorrelationKernel {
        CorrelationKernel::new(law, topo, n, k).unwrap()
    }

    #[test]
    fn basis_strings() {
        assert_eq!(basis_index(3, "101").unwrap(), 5);
        assert!(basis_index(3, "10").is_err());
        assert!(basis_index(2, "1x").is_err());
        let rho = DensityMatrix::ghz(2).unwrap();
        assert!((rho.element("00", "11").unwrap().re - 0.5).abs() < 1e-15);
        assert!(rho.element("00", "111").is_err());
    }

    #[test]
    fn single_qubit_constant_rate() {
        let g0 = 0.8;
        let gen = DephasingGenerator::from_kernel(
            kernel(DephasingLaw::markovian(g0).unwrap(), BathTopology::FullyCorrelated, 1, None),
            3.0,
            0.0,
        );
        let times = grid(100, 1.0);
        let states = integrate(&gen, &DensityMatrix::ghz(1).unwrap(), &times, 1e-3).unwrap();
        let rho01 = offdiagonal_trace(&states, "0", "1").unwrap();
        for (t, r) in times.iter().zip(&rho01) {
            let expected = 0.5 * (-g0 * t).exp();
            assert!(((r.norm() - expected) / expected).abs() < 1e-6);
        }
        // ρ̇ = C(σzρσz - ρ) without the ½ prefactor is the same generator with
        // C doubled, giving ½e^{-2γ₀t}.
        let doubled = DephasingGenerator::from_kernel(
            kernel(DephasingLaw::markovian(2.0 * g0).unwrap(), BathTopology::FullyCorrelated, 1, None),
            3.0,
            0.0,
        );
        let states = integrate(&doubled, &DensityMatrix::ghz(1).unwrap(), &times, 1e-3).unwrap();
        let last = states.last().unwrap().element("0", "1").unwrap();
        assert!(((last.norm() - 0.5 * (-2.0 * g0).exp()) / (0.5 * (-2.0 * g0).exp())).abs() < 1e-6);
    }

    #[test]
    fn matched_aux_preserves_coherence_and_rotates() {
        let (n, w0, wa) = (2, TAU * 5.0, 1.7);
        let gen = DephasingGenerator::from_kernel(
            kernel(DephasingLaw::markovian(1.0).unwrap(), BathTopology::FullyCorrelated, n, Some(n as f64)),
            w0,
            wa,
        );
        let times = grid(50, 1.0);
        let states = integrate(&gen, &DensityMatrix::ghz_with_aux(n).unwrap(), &times, 1e-4).unwrap();
        let (one, two) = aux_pair_strings(n);
        let series = offdiagonal_trace(&states, &one, &two).unwrap();
        assert!((series[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        for (t, r) in times.iter().zip(&series) {
            let expected = Complex64::from_polar(0.5, (n as f64 * w0 - wa) * t);
            assert!((r - expected).norm() < 1e-7, "t = {t}: {r} vs {expected}");
        }
    }

    #[test]
    fn uncorrelated_aux_adds_k_squared() {
        let (n, k) = (2, 1.5);
        let law = DephasingLaw::non_markovian(1.0).unwrap();
        let gen =
            DephasingGenerator::from_kernel(kernel(law.clone(), BathTopology::Uncorrelated, n, Some(k)), 2.0, 0.5);
        let times = grid(20, 1.0);
        let states = integrate(&gen, &DensityMatrix::ghz_with_aux(n).unwrap(), &times, 1e-4).unwrap();
        let (one, two) = aux_pair_strings(n);
        for (t, r) in times.iter().zip(offdiagonal_trace(&states, &one, &two).unwrap()) {
            let expected = 0.5 * (-(n as f64 + k * k) * law.factor(*t).unwrap()).exp();
            assert!(((r.norm() - expected) / expected).abs() < 1e-6);
        }
    }

    #[test]
    fn partial_optimum_matches_closed_form() {
        let (n, x) = (3, 0.7);
        let opt = optimal_aux_coupling(n, x).unwrap();
        let law = DephasingLaw::markovian(1.0).unwrap();
        let gen = DephasingGenerator::from_kernel(
            kernel(law, BathTopology::partial(x).unwrap(), n, Some(opt.coupling)),
            1.0,
            0.0,
        );
        let times = grid(10, 1.0);
        let states = integrate(&gen, &DensityMatrix::ghz_with_aux(n).unwrap(), &times, 1e-3).unwrap();
        let (one, two) = aux_pair_strings(n);
        let a = partial_corr_factor(n, x, opt.coupling).unwrap();
        assert!((a - opt.factor).abs() < 1e-12);
        for (t, r) in times.iter().zip(offdiagonal_trace(&states, &one, &two).unwrap()) {
            let expected = 0.5 * (-a * t).exp();
            assert!(((r.norm() - expected) / expected).abs() < 1e-6);
        }
    }

    #[test]
    fn populations_trace_and_hermiticity_preserved() {
        let amps: Vec<Complex64> = (0..8).map(|k| Complex64::new(0.1 + k as f64 * 0.05, 0.03 * k as f64)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let rho0 = DensityMatrix::from_state(3, &amps).unwrap();
        let gen = DephasingGenerator::from_kernel(
            kernel(DephasingLaw::markovian(0.9).unwrap(), BathTopology::partial(0.4).unwrap(), 2, Some(1.2)),
            4.0,
            1.0,
        );
        let states = integrate(&gen, &rho0, &grid(10, 1.0), 1e-3).unwrap();
        for rho in &states {
            for k in 0..8 {
                assert!((rho.get(k, k) - rho0.get(k, k)).norm() < 1e-10);
            }
            assert!(rho.hermiticity_error() < 1e-12);
            assert!((rho.trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn halving_step_gains_fourth_order() {
        let law = DephasingLaw::non_markovian(2.0).unwrap();
        let gen = DephasingGenerator::from_kernel(
            kernel(law.clone(), BathTopology::FullyCorrelated, 2, Some(0.5)),
            TAU * 2.0,
            0.0,
        );
        let times = grid(4, 1.0);
        let (one, two) = aux_pair_strings(2);
        let a = partial_corr_factor(2, 0.0, 0.5).unwrap();
        let deviation = |step: f64| {
            let states = integrate(&gen, &DensityMatrix::ghz_with_aux(2).unwrap(), &times, step).unwrap();
            times
                .iter()
                .zip(offdiagonal_trace(&states, &one, &two).unwrap())
                .map(|(t, r)| {
                    let exact = Complex64::from_polar(0.5 * (-a * law.factor(*t).unwrap()).exp(), TAU * 4.0 * t);
                    (r - exact).norm()
                })
                .fold(0.0, f64::max)
        };
        let coarse = deviation(0.002);
        let finer = deviation(0.001);
        assert!(coarse / finer >= 8.0, "{coarse:e} / {finer:e}");
    }

    #[test]
    fn too_large_step_is_rejected() {
        let gen = DephasingGenerator::from_kernel(
            kernel(DephasingLaw::markovian(1.0).unwrap(), BathTopology::FullyCorrelated, 2, Some(2.0)),
            TAU * 50.0,
            0.0,
        );
        let rho = DensityMatrix::ghz_with_aux(2).unwrap();
        let err = integrate(&gen, &rho, &[0.0, 0.5], 0.25).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        assert!(integrate(&gen, &rho, &[0.0, 0.1, 0.15], 0.1).is_err());
    }

    #[test]
    fn mode_bath_generator_uses_mode_sums() {
        let bath = ModeBath::new(
            vec![BathMode { frequency: 2.0, coupling: 0.3 }, BathMode { frequency: 5.0, coupling: 0.2 }],
            0.5,
            vec![1.0],
        )
        .unwrap();
        let gen = DephasingGenerator::from_modes(bath.clone(), 1, 1.0, None).unwrap();
        let times = grid(10, 1.0);
        let states = integrate(&gen, &DensityMatrix::ghz(1).unwrap(), &times, 1e-3).unwrap();
        // |ρ01| = ½ exp(-∫C dt), with ∫C from the analytic antiderivative
        let integral = |t: f64| -> f64 {
            bath.modes()
                .iter()
                .map(|m| {
                    let nbar = crate::dephasing::occupation(m.frequency, 0.5);
                    2.0 * m.coupling * m.coupling * (2.0 * nbar + 1.0) * (1.0 - (m.frequency * t).cos())
                        / (m.frequency * m.frequency)
                })
                .sum()
        };
        for (t, rho) in times.iter().zip(&states) {
            let expected = 0.5 * (-integral(*t)).exp();
            assert!((rho.element("0", "1").unwrap().norm() - expected).abs() < 1e-9);
        }
        assert!(DephasingGenerator::from_modes(bath, 2, 1.0, None).is_err());
    }

    #[test]
    fn lamb_shift_cancels_for_global_flip_pair() {
        let bath = ModeBath::new(
            vec![BathMode { frequency: 1.5, coupling: 0.4 }, BathMode { frequency: 3.0, coupling: 0.25 }],
            0.0,
            vec![1.0, 0.8, 2.0],
        )
        .unwrap();
        let times = grid(8, 1.0);
        let (one, two) = aux_pair_strings(2);
        let run = |lamb: bool| {
            let gen = DephasingGenerator::from_modes(bath.clone(), 2, 3.0, Some(1.0)).unwrap().with_lamb_shift(lamb);
            let states = integrate(&gen, &DensityMatrix::ghz_with_aux(2).unwrap(), &times, 1e-3).unwrap();
            offdiagonal_trace(&states, &one, &two).unwrap()
        };
        for (a, b) in run(false).iter().zip(run(true)) {
            assert!((a - b).norm() < 1e-12);
        }
        // a pair that is not a global flip does pick up a Lamb phase
        let gen = DephasingGenerator::from_modes(bath.clone(), 2, 3.0, Some(1.0)).unwrap();
        let r0 = gen.rates(0.7).unwrap();
        let r1 = gen.clone().with_lamb_shift(true).rates(0.7).unwrap();
        let (m, n) = (basis_index(3, "001").unwrap(), basis_index(3, "010").unwrap());
        assert!((r0[m * 8 + n].im - r1[m * 8 + n].im).abs() > 1e-6);
    }
}
