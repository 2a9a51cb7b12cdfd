use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::noise::{NoiseSpec, PhaseSet};
use crate::error::{domain, Result};

/// Trajectories per work item. Fixed so the reduction tree does not
/// depend on the thread count.
const CHUNK: usize = 64;

/// Monte Carlo statistics on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// ⟨cos 2φ_B⟩.
    pub mean_cos: Vec<f64>,
    /// ⟨sin 2φ_B⟩.
    pub mean_sin: Vec<f64>,
    /// P₀(t).
    pub probability: Vec<f64>,
    /// Standard error of P₀.
    pub stderr: Vec<f64>,
    pub stderr_cos: Vec<f64>,
    pub stderr_sin: Vec<f64>,
    pub realizations: usize,
}

impl EnsembleResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// |⟨e^{2iφ_B}⟩| and its standard error.
    pub fn coherence(&self, k: usize) -> (f64, f64) {
        (self.mean_cos[k].hypot(self.mean_sin[k]), self.stderr_cos[k].hypot(self.stderr_sin[k]))
    }

    /// CSV with columns `t, mean_cos, mean_sin, P0, stderr, M`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "mean_cos", "mean_sin", "P0", "stderr", "M"])?;
        for k in 0..self.len() {
            w.write_record([
                sci(self.times[k]),
                sci(self.mean_cos[k]),
                sci(self.mean_sin[k]),
                sci(self.probability[k]),
                sci(self.stderr[k]),
                self.realizations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scientific notation with 15 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

/// `φ_A(t) = ½(NΩ₀ - ω_a) t`.
pub fn control_phase(working: usize, frequency: f64, aux_frequency: f64, t: f64) -> f64 {
    0.5 * (working as f64 * frequency - aux_frequency) * t
}

/// Per-time sin/cos of every tone, shared by all trajectories.
struct ToneTable {
    sin: Vec<f64>,
    cos: Vec<f64>,
    weights: Vec<f64>,
    tones: usize,
}

impl ToneTable {
    fn new(spec: &NoiseSpec, times: &[f64]) -> Self {
        let tones = spec.tones;
        let mut sin = Vec::with_capacity(times.len() * tones);
        let mut cos = Vec::with_capacity(times.len() * tones);
        for &t in times {
            for j in 1..=tones {
                let (s, c) = (spec.tone_frequency(j) * t).sin_cos();
                sin.push(s);
                cos.push(c);
            }
        }
        let weights = (1..=tones).map(|j| spec.shape.weight(j)).collect();
        Self { sin, cos, weights, tones }
    }
}

/// φ_B of one trajectory on the grid, using the angle-addition form of the
/// exact tone integrals.
fn trajectory_phases_with(spec: &NoiseSpec, table: &ToneTable, phases: &PhaseSet, working: usize, out: &mut Vec<f64>) {
    let sc = |row: &[f64]| -> Vec<(f64, f64)> { row.iter().map(|p| p.sin_cos()).collect() };
    let work: Vec<Vec<(f64, f64)>> = phases.working_rows().iter().map(|r| sc(r)).collect();
    let aux = sc(phases.aux_row());
    let w_work = spec.working_weight(working);
    let b_aux = spec.aux_amplitude;
    let j_count = table.tones;
    out.clear();
    let times = table.sin.len() / j_count.max(1);
    for k in 0..times {
        let s_row = &table.sin[k * j_count..(k + 1) * j_count];
        let c_row = &table.cos[k * j_count..(k + 1) * j_count];
        let mut total = 0.0;
        for j in 0..j_count {
            let inc = |(sp, cp): (f64, f64)| s_row[j] * cp + c_row[j] * sp - sp;
            let w: f64 = work.iter().map(|row| inc(row[j])).sum();
            total += table.weights[j] * (w_work * w - b_aux * inc(aux[j]));
        }
        out.push(0.5 * total);
    }
}

/// φ_B(t) on `times` for trajectory `trajectory`.
pub fn trajectory_phases(spec: &NoiseSpec, working: usize, times: &[f64], trajectory: u64) -> Vec<f64> {
    let table = ToneTable::new(spec, times);
    let phases = PhaseSet::draw(spec, working, trajectory);
    let mut out = Vec::with_capacity(times.len());
    trajectory_phases_with(spec, &table, &phases, working, &mut out);
    out
}

#[derive(Clone)]
struct Moments {
    c: Vec<f64>,
    s: Vec<f64>,
    cc: Vec<f64>,
    ss: Vec<f64>,
    cs: Vec<f64>,
}

impl Moments {
    fn zeros(n: usize) -> Self {
        Self { c: vec![0.0; n], s: vec![0.0; n], cc: vec![0.0; n], ss: vec![0.0; n], cs: vec![0.0; n] }
    }

    fn add(&mut self, other: &Self) {
        for (a, b) in [
            (&mut self.c, &other.c),
            (&mut self.s, &other.s),
            (&mut self.cc, &other.cc),
            (&mut self.ss, &other.ss),
            (&mut self.cs, &other.cs),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

/// Ensemble-averaged Ramsey readout
/// `P₀ = ½[1 + cos2φ_A ⟨cos2φ_B⟩ - sin2φ_A ⟨sin2φ_B⟩]` over `realizations`
/// independent phase sets.
///
/// Trajectories run in parallel on the current rayon pool; results are
/// bit-identical for any thread count.
pub fn run_ensemble(
    spec: &NoiseSpec,
    working: usize,
    frequency: f64,
    aux_frequency: f64,
    times: &[f64],
    realizations: usize,
) -> Result<EnsembleResult> {
    spec.validate()?;
    if realizations < 2 {
        return Err(domain(format!("need at least 2 realizations, got {realizations}")));
    }
    if working == 0 {
        return Err(domain("need at least one working qubit"));
    }
    if times.is_empty() {
        return Err(domain("time grid is empty"));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("time grid must be non-negative and strictly ascending"));
    }
    let table = ToneTable::new(spec, times);
    let n_t = times.len();
    let chunks = realizations.div_ceil(CHUNK);

    let partials: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Moments::zeros(n_t);
            let mut phi = Vec::with_capacity(n_t);
            let end = ((chunk + 1) * CHUNK).min(realizations);
            for m in chunk * CHUNK..end {
                let phases = PhaseSet::draw(spec, working, m as u64);
                trajectory_phases_with(spec, &table, &phases, working, &mut phi);
                for (k, p) in phi.iter().enumerate() {
                    let (s, c) = (2.0 * p).sin_cos();
                    acc.c[k] += c;
                    acc.s[k] += s;
                    acc.cc[k] += c * c;
                    acc.ss[k] += s * s;
                    acc.cs[k] += c * s;
                }
            }
            acc
        })
        .collect();

    let mut total = Moments::zeros(n_t);
    for p in &partials {
        total.add(p);
    }

    let m = realizations as f64;
    let var = |sum: f64, sq: f64| ((sq - sum * sum / m) / (m - 1.0)).max(0.0);
    let mut result = EnsembleResult {
        times: times.to_vec(),
        mean_cos: Vec::with_capacity(n_t),
        mean_sin: Vec::with_capacity(n_t),
        probability: Vec::with_capacity(n_t),
        stderr: Vec::with_capacity(n_t),
        stderr_cos: Vec::with_capacity(n_t),
        stderr_sin: Vec::with_capacity(n_t),
        realizations,
    };
    for (k, &t) in times.iter().enumerate() {
        let (mc, ms) = (total.c[k] / m, total.s[k] / m);
        let (vc, vs) = (var(total.c[k], total.cc[k]), var(total.s[k], total.ss[k]));
        let cov = (total.cs[k] - total.c[k] * total.s[k] / m) / (m - 1.0);
        let (sa, ca) = (2.0 * control_phase(working, frequency, aux_frequency, t)).sin_cos();
        // p = ½[1 + ca·c - sa·s] per trajectory
        let vp = (0.25 * (ca * ca * vc + sa * sa * vs - 2.0 * ca * sa * cov)).max(0.0);
        result.mean_cos.push(mc);
        result.mean_sin.push(ms);
        result.probability.push(0.5 * (1.0 + ca * mc - sa * ms));
        result.stderr.push((vp / m).sqrt());
        result.stderr_cos.push((vc / m).sqrt());
        result.stderr_sin.push((vs / m).sqrt());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::noise::{accumulated_phase, NoiseShape, PhasePolicy};

    fn spec(policy: PhasePolicy, b2: f64) -> NoiseSpec {
        NoiseSpec {
            working_amplitude: 0.3,
            aux_amplitude: b2,
            base_frequency: 2.0,
            tones: 40,
            shape: NoiseShape::White,
            phase_policy: policy,
            seed: 9,
        }
    }

    #[test]
    fn table_path_matches_direct_integration() {
        for policy in [PhasePolicy::SharedAllQubits, PhasePolicy::IndependentPerQubit] {
            let s = spec(policy, 0.2);
            let times: Vec<f64> = (0..30).map(|k| k as f64 * 0.037).collect();
            let fast = trajectory_phases(&s, 3, &times, 4);
            let phases = PhaseSet::draw(&s, 3, 4);
            for (t, f) in times.iter().zip(&fast) {
                assert!((accumulated_phase(&s, &phases, 3, *t) - f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matched_ensemble_is_noise_free() {
        let s = spec(PhasePolicy::WorkingSharedAuxMatched, 4.0 * 0.3);
        let (w, wa) = (7.0, 1.5);
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.01).collect();
        let r = run_ensemble(&s, 4, w, wa, &times, 17).unwrap();
        for (k, t) in times.iter().enumerate() {
            let expected = 0.5 * (1.0 + ((4.0 * w - wa) * t).cos());
            assert!((r.probability[k] - expected).abs() < 1e-14);
            assert_eq!(r.mean_cos[k], 1.0);
            assert_eq!(r.mean_sin[k], 0.0);
            assert_eq!(r.stderr[k], 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = spec(PhasePolicy::SharedAllQubits, 0.0);
        assert!(run_ensemble(&s, 2, 1.0, 0.0, &[0.0, 0.1], 1).is_err());
        assert!(run_ensemble(&s, 2, 1.0, 0.0, &[], 5).is_err());
        assert!(run_ensemble(&s, 2, 1.0, 0.0, &[0.2, 0.1], 5).is_err());
        assert!(run_ensemble(&s, 0, 1.0, 0.0, &[0.1], 5).is_err());
    }

    #[test]
    fn rerun_is_bit_identical() {
        let s = spec(PhasePolicy::IndependentPerQubit, 0.1);
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.05).collect();
        let a = run_ensemble(&s, 3, 5.0, 0.0, &times, 150).unwrap();
        let b = run_ensemble(&s, 3, 5.0, 0.0, &times, 150).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_has_one_row_per_time() {
        let s = spec(PhasePolicy::SharedAllQubits, 0.0);
        let r = run_ensemble(&s, 2, 1.0, 0.0, &[0.0, 0.1, 0.2], 4).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,mean_cos,mean_sin,P0,stderr,M");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("1.00000000000000e-1,"));
        assert!(lines[2].ends_with(",4"));
    }
}
