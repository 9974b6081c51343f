use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{knots, Oscillatory};
use super::multiplier::check_tol;
use super::phase::Phase;
use crate::decomposition::{GoodComponent, IntegerInterval, PartitionOfUnity};
use crate::error::{Error, Result};
use crate::fewnomial::{falling_factorial, root2_pow, Fewnomial, ScaleFrame};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceSample {
    pub value: Complex64,
    pub abs_err_estimate: f64,
    /// `|t|`-interval where the weight is nonzero; `None` for an empty support.
    pub support: Option<(f64, f64)>,
}

/// Window of piece `l'` on component `comp`: `|t|`-support, piece index `k = ⌈γ_{j1}⌉ + l'`
/// in `λ_{j1}` units, and the two partitions.
struct PieceWindow {
    k: i64,
    bump: PartitionOfUnity,
    cutoff: PartitionOfUnity,
    range: IntegerInterval,
    support: Option<(f64, f64)>,
}

impl PieceWindow {
    fn new(frame: &ScaleFrame, comp: &GoodComponent, l_prime: i64) -> Result<Self> {
        let m = frame
            .monomials
            .get(comp.j1)
            .ok_or(Error::IndexOutOfRange { index: comp.j1, len: frame.len() })?;
        let k = m.piece_base() + l_prime;
        let bump = PartitionOfUnity::new(m.lambda);
        let cutoff = PartitionOfUnity::new(frame.lambda);
        let (c_lo, c_hi) = cutoff.cutoff_support(comp.range);
        let lo = root2_pow(k, m.exponent).max(c_lo);
        let hi = root2_pow(k + 2, m.exponent).min(c_hi);
        Ok(PieceWindow { k, bump, cutoff, range: comp.range, support: (lo < hi).then_some((lo, hi)) })
    }

    fn weight(&self, t: f64) -> f64 {
        self.bump.bump(self.k, t) * self.cutoff.cutoff(self.range, t)
    }
}

/// `∫ e^{i(Q(t) - tξ)} ψ^{(j1)}_{k}(t) Φ(t) dt/t` over the real line, with `k = ⌈γ_{j1}⌉ + l'`
/// and `Φ` the component cutoff; not required to meet `tol`.
pub fn piece_sample(q: &Fewnomial, comp: &GoodComponent, l_prime: i64, xi: f64, tol: f64) -> Result<PieceSample> {
    check_tol(tol)?;
    let frame = q.scale_frame()?;
    let win = PieceWindow::new(&frame, comp, l_prime)?;
    let Some((lo, hi)) = win.support else {
        return Ok(PieceSample { value: Complex64::new(0.0, 0.0), abs_err_estimate: 0.0, support: None });
    };
    let amp = |t: f64| win.weight(t) / t;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (phase, sign) in [(Phase::forward(q, xi), 1.0), (Phase::mirrored(q, xi), -1.0)] {
        let pts = knots(lo, hi, phase.critical_points());
        let r = Oscillatory { phase: &phase, amp }.integrate(&pts, tol / 2.0);
        value += r.value * sign;
        err += r.error;
    }
    if !value.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(PieceSample { value, abs_err_estimate: err, support: Some((lo, hi)) })
}

/// Certified piece integral; zero exactly when the weight vanishes identically.
pub fn piece_multiplier(q: &Fewnomial, comp: &GoodComponent, l_prime: i64, xi: f64, tol: f64) -> Result<Complex64> {
    let s = piece_sample(q, comp, l_prime, xi, tol)?;
    if s.abs_err_estimate <= tol {
        Ok(s.value)
    } else {
        Err(Error::ToleranceNotMet { requested: tol, achieved: s.abs_err_estimate })
    }
}

/// `|t|`-support of piece `l'`, if nonempty.
pub fn piece_support(q: &Fewnomial, comp: &GoodComponent, l_prime: i64) -> Result<Option<(f64, f64)>> {
    Ok(PieceWindow::new(&q.scale_frame()?, comp, l_prime)?.support)
}

/// Frequencies that place a stationary point of `Q(t) - tξ` inside the support of each piece
/// `l' ∈ l_range`: `ξ = Q'(±x)` at `per_piece` log-spaced `x` per piece.
pub fn stationary_xi_grid(q: &Fewnomial, comp: &GoodComponent, l_range: IntegerInterval, per_piece: usize) -> Result<Vec<f64>> {
    let frame = q.scale_frame()?;
    let mut out = Vec::new();
    for l in l_range.iter() {
        let Some((lo, hi)) = PieceWindow::new(&frame, comp, l)?.support else {
            continue;
        };
        for i in 0..per_piece {
            let x = lo * (hi / lo).powf((i as f64 + 0.5) / per_piece as f64);
            for s in [x, -x] {
                if let Ok(v) = q.eval(s, 1) {
                    out.push(v);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Outcome of checking `λ_{j1}^{2k} |Q''(±λ_{j1}^k t)| >= 2^{l'-2}` on each piece support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Smallest ratio of the two sides; infinite when nothing was sampled.
    pub min_ratio: f64,
    pub samples: usize,
    pub failures: usize,
    /// Pieces whose weight vanishes identically.
    pub empty_pieces: usize,
}

/// `log2 |Q^{(order)}(±2^{log2_x})|`, formed without overflow.
fn log2_abs_derivative(q: &Fewnomial, log2_x: f64, negative: bool, order: u32) -> f64 {
    let terms: Vec<(f64, f64)> = q
        .terms()
        .filter(|&(_, k)| k >= order)
        .map(|(a, k)| {
            let p = k - order;
            let sign = if negative && p % 2 == 1 { -a.signum() } else { a.signum() };
            (sign, a.abs().log2() + falling_factorial(k, order).log2() + p as f64 * log2_x)
        })
        .collect();
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|&(s, g)| s * (g - top).exp2()).sum::<f64>().abs().log2()
}

/// Samples the second-derivative chain at `samples` interior points of every piece support
/// with `l' ∈ l_range`, where the weight is positive.
pub fn second_derivative_chain(q: &Fewnomial, comp: &GoodComponent, l_range: IntegerInterval, samples: usize) -> Result<ChainReport> {
    let frame = q.scale_frame()?;
    let m = frame.monomials.get(comp.j1).ok_or(Error::IndexOutOfRange { index: comp.j1, len: frame.len() })?;
    let alpha = m.exponent as f64;
    let mut report = ChainReport { min_ratio: f64::INFINITY, samples: 0, failures: 0, empty_pieces: 0 };
    for l in l_range.iter() {
        let win = PieceWindow::new(&frame, comp, l)?;
        if win.support.is_none() {
            report.empty_pieces += 1;
            continue;
        }
        for i in 1..=samples {
            // t = λ_{j1}^{s}, s ∈ (0, 2)
            let s = 2.0 * i as f64 / (samples + 1) as f64;
            let log2_x = (win.k as f64 + s) / alpha;
            let x = log2_x.exp2();
            if win.weight(x) <= 0.0 {
                continue;
            }
            for negative in [false, true] {
                let log2_ratio = 2.0 * win.k as f64 / alpha + log2_abs_derivative(q, log2_x, negative, 2) - (l - 2) as f64;
                let ratio = log2_ratio.exp2();
                report.samples += 1;
                report.min_ratio = report.min_ratio.min(ratio);
                if !(ratio >= 1.0) {
                    report.failures += 1;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c_hat: f64,
    pub delta_hat: f64,
    /// RMS residual of the `log2` fit.
    pub residual: f64,
    pub l_range: IntegerInterval,
    /// `(l', s(l'))` for every resolved scale used in the fit.
    pub points: Vec<(i64, f64)>,
    pub chain: ChainReport,
}

/// Least-squares fit of `log2 s(l') ≈ log2 C - δ l'`, where `s(l')` is the largest piece
/// modulus over `xi_grid`. Scales with `s(l') <= 8 tol` are unresolved and skipped.
pub fn decay_fit(q: &Fewnomial, comp: &GoodComponent, xi_grid: &[f64], l_range: IntegerInterval, tol: f64) -> Result<DecayFit> {
    check_tol(tol)?;
    if xi_grid.is_empty() {
        return Err(Error::InvalidArgument("frequency grid is empty".into()));
    }
    let jobs: Vec<(i64, f64)> = l_range.iter().flat_map(|l| xi_grid.iter().map(move |&x| (l, x))).collect();
    let values: Vec<(i64, f64)> = jobs
        .par_iter()
        .map(|&(l, x)| piece_multiplier(q, comp, l, x, tol).map(|v| (l, v.norm())))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for l in l_range.iter() {
        let s = values.iter().filter(|v| v.0 == l).map(|v| v.1).fold(0.0, f64::max);
        if s > 8.0 * tol {
            points.push((l, s));
        }
    }
    if points.len() < 5 {
        return Err(Error::InsufficientPoints { needed: 5, found: points.len() });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let (intercept, slope) = crate::experiments::stats::ols(&xs, &ys).ok_or(Error::InsufficientPoints { needed: 5, found: points.len() })?;
    let residual =
        (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    let chain = second_derivative_chain(q, comp, l_range, 16)?;
    Ok(DecayFit { c_hat: intercept.exp2(), delta_hat: -slope, residual, l_range, points, chain })
}
