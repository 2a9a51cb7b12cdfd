//! Bracketed one-dimensional minimisation.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search on `[lo, hi]`, assuming `f` is unimodal there.
/// Stops when the bracket is narrower than `tol * (1 + |x|)`.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = 2;
    while (b - a) > tol * (1.0 + c.abs()) && evaluations < 500 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Minimum { x, value, evaluations }
}

/// Minimises `f` on `(0, upper]`: a log-spaced scan over `decades` decades
/// below `upper` brackets the lowest sample, then golden section refines it.
///
/// Fails when the lowest scanned value sits at either end of the scan,
/// i.e. there is no interior minimum to bracket.
pub fn minimize_log_bracketed(f: impl Fn(f64) -> f64, upper: f64, points: usize, decades: f64) -> Result<Minimum> {
    if !(upper > 0.0 && upper.is_finite()) || points < 3 {
        return Err(Error::OptimizationFailed(format!("invalid scan: upper = {upper}, points = {points}")));
    }
    let grid: Vec<f64> =
        (0..points).map(|k| upper * 10f64.powf(-decades * (1.0 - k as f64 / (points - 1) as f64))).collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::OptimizationFailed("objective is not finite on the scan grid".into()))?;
    if best == 0 || best == points - 1 {
        return Err(Error::OptimizationFailed(format!(
            "lowest scanned value at the scan boundary x = {:.6e} (f = {:.6e}); no interior minimum in (0, {upper}]",
            grid[best], values[best]
        )));
    }
    let mut m = golden_section(&f, grid[best - 1], grid[best + 1], 1e-12);
    m.evaluations += points;
    Ok(m)
}
