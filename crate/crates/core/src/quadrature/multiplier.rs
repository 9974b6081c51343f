use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{knots, Oscillatory, SegmentResult};
use super::gauss_kronrod;
use super::phase::Phase;
use crate::error::{Error, Result};
use crate::fewnomial::{root2_pow, Fewnomial};

/// Phase size (radians) of `Σ|a_j| t^{α_j} + |ξ| t` at the end of the inner region.
const INNER_PHASE: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSample {
    pub xi: f64,
    pub value: Complex64,
    pub abs_err_estimate: f64,
    /// Integration segments used (inner region plus both outer branches).
    pub pieces_used: usize,
}

impl MultiplierSample {
    pub fn is_certified(&self, tol: f64) -> bool {
        self.value.is_finite() && self.abs_err_estimate <= tol
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-12 && tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Truncation points of the integral, `t_inner` and the outer cutoff `T`, and their
/// positions in units of `λ = 2^{1/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkingWindow {
    pub t_inner: f64,
    pub t_outer: f64,
    pub l_min: i64,
    pub l_max: i64,
}

fn block_base(q: &Fewnomial) -> u32 {
    q.degree().max(1)
}

/// Solves `Σ|a_j| t^{α_j} + |ξ| t = INNER_PHASE` by bisection on `log2 t`.
fn inner_radius(q: &Fewnomial, xi: f64) -> f64 {
    let mut terms: Vec<(f64, f64)> = q.terms().map(|(a, k)| (a.abs().log2(), k as f64)).collect();
    if xi != 0.0 {
        terms.push((xi.abs().log2(), 1.0));
    }
    let size = |s: f64| -> f64 {
        let logs: Vec<f64> = terms.iter().map(|&(la, k)| la + k * s).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + logs.iter().map(|g| (g - top).exp2()).sum::<f64>().log2()
    };
    let target = INNER_PHASE.log2();
    let (mut lo, mut hi) = (-1100.0, 1100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if size(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp2()
}

/// `2i e^{iE(t)} sin(O(t) - tξ) / t` with `E`, `O` the even and odd parts, written as
/// `sinc(ψ) · ψ/t` so that nothing is singular at `t = 0`.
fn inner_integral(q: &Fewnomial, xi: f64, t0: f64, budget: f64) -> SegmentResult {
    let even: Vec<(f64, i32)> = q.terms().filter(|(_, k)| k % 2 == 0).map(|(a, k)| (a, k as i32)).collect();
    let odd: Vec<(f64, i32)> = q.terms().filter(|(_, k)| k % 2 == 1).map(|(a, k)| (a, k as i32)).collect();
    let f = |t: f64| {
        let e: f64 = even.iter().map(|&(a, k)| a * t.powi(k)).sum();
        let slope: f64 = odd.iter().map(|&(a, k)| a * t.powi(k - 1)).sum::<f64>() - xi;
        let psi = slope * t;
        let sinc = if psi == 0.0 { 1.0 } else { psi.sin() / psi };
        Complex64::new(0.0, 2.0 * sinc * slope) * Complex64::from_polar(1.0, e)
    };
    let r = gauss_kronrod::integrate(&f, 0.0, t0, budget, 2000);
    SegmentResult { value: r.value, error: r.error, segments: r.panels }
}

/// `∫_{t0}^∞ e^{iφ(t)} dt/t`: the tail beyond `T` is bounded by one integration by parts,
/// `|∫_T^∞| <= 2 / (|φ'(T)| T)`, valid once `1/(tφ')` is monotone.
fn outer_branch(phase: &Phase, t0: f64, base: u32, tail_budget: f64, budget: f64) -> Result<(SegmentResult, f64, f64)> {
    let lambda = root2_pow(1, base);
    let mut t_end = t0.max(phase.monotone_tail_start() * (1.0 + 1e-9));
    let tail = |t: f64| 2.0 / (phase.d1(t).abs() * t);
    let mut guard = 0;
    while !(tail(t_end) <= tail_budget) {
        t_end *= lambda;
        guard += 1;
        if !t_end.is_finite() || guard > 1_000_000 {
            return Err(Error::Overflow);
        }
    }
    let tail_bound = tail(t_end);
    let l0 = (t0.log2() * base as f64).ceil() as i64;
    let l1 = (t_end.log2() * base as f64).floor() as i64;
    let blocks = (l0..=l1).map(|l| root2_pow(l, base));
    let crit = phase.critical_points().into_iter().chain(phase.third_derivative_roots());
    let pts = knots(t0, t_end, blocks.chain(crit));
    let osc = Oscillatory { phase, amp: |t: f64| 1.0 / t };
    let r = osc.integrate_bounded(&pts, budget, |a, b| segment_bound(phase, a, b));
    if !r.value.is_finite() {
        return Err(Error::Overflow);
    }
    Ok((r, tail_bound, t_end))
}

/// Bound on `|∫_a^b e^{iφ} dt/t|` when `φ'` and `φ''` are monotone and of one sign on
/// `[a, b]`: van der Corput with the first or second derivative, times `1/a` for the
/// decreasing amplitude, or the trivial `ln(b/a)`.
fn segment_bound(phase: &Phase, a: f64, b: f64) -> f64 {
    let m1 = phase.d1(a).abs().min(phase.d1(b).abs());
    let m2 = phase.d2(a).abs().min(phase.d2(b).abs());
    let first = if m1 > 0.0 { 3.0 / (a * m1) } else { f64::INFINITY };
    let second = if m2 > 0.0 { 8.0 / (a * m2.sqrt()) } else { f64::INFINITY };
    (b / a).ln().min(first).min(second)
}

fn evaluate(q: &Fewnomial, xi: f64, tol: f64) -> Result<(MultiplierSample, WorkingWindow)> {
    if !xi.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be finite, got {xi}")));
    }
    check_tol(tol)?;
    let base = block_base(q);
    if q.is_empty() && xi == 0.0 {
        let w = WorkingWindow { t_inner: 0.0, t_outer: 0.0, l_min: 0, l_max: 0 };
        return Ok((MultiplierSample { xi, value: Complex64::new(0.0, 0.0), abs_err_estimate: 0.0, pieces_used: 0 }, w));
    }
    let t0 = inner_radius(q, xi);
    let inner = inner_integral(q, xi, t0, tol / 8.0);
    let (plus, tail_p, end_p) = outer_branch(&Phase::forward(q, xi), t0, base, tol / 8.0, 5.0 * tol / 16.0)?;
    let (minus, tail_m, end_m) = outer_branch(&Phase::mirrored(q, xi), t0, base, tol / 8.0, 5.0 * tol / 16.0)?;
    let value = inner.value + plus.value - minus.value;
    let err = inner.error + plus.error + minus.error + tail_p + tail_m;
    let t_outer = end_p.max(end_m);
    let window = WorkingWindow {
        t_inner: t0,
        t_outer,
        l_min: (t0.log2() * base as f64).floor() as i64,
        l_max: (t_outer.log2() * base as f64).ceil() as i64,
    };
    Ok((
        MultiplierSample { xi, value, abs_err_estimate: err, pieces_used: inner.segments + plus.segments + minus.segments },
        window,
    ))
}

/// `m(ξ) = p.v.∫ e^{i(Q(t) - tξ)} dt/t` with its error estimate, whether or not the
/// estimate meets `tol`.
pub fn multiplier_sample(q: &Fewnomial, xi: f64, tol: f64) -> Result<MultiplierSample> {
    evaluate(q, xi, tol).map(|(s, _)| s)
}

/// Certified `m(ξ)`: fails with [`Error::ToleranceNotMet`] when the error estimate
/// exceeds `tol`.
pub fn pv_multiplier(q: &Fewnomial, xi: f64, tol: f64) -> Result<MultiplierSample> {
    let s = multiplier_sample(q, xi, tol)?;
    if s.is_certified(tol) {
        Ok(s)
    } else {
        Err(Error::ToleranceNotMet { requested: tol, achieved: s.abs_err_estimate })
    }
}

/// Inner and outer truncation used for `m(ξ)`.
pub fn working_window(q: &Fewnomial, xi: f64, tol: f64) -> Result<WorkingWindow> {
    evaluate(q, xi, tol).map(|(_, w)| w)
}

/// Frequency grid for [`multiplier_sup`]. Automatic and dyadic grids are laid out in the
/// normalized frame `r = min_j |a_j|^{-1/α_j}` (largest normalized coefficient 1), where
/// `m_{Q_r}(ξ') = m_Q(ξ'/r)`; explicit grids are in original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// `ξ' = ±2^{k/per_octave}`, `|k| <= K` with `K` from the normalized phase, plus 0.
    Auto { per_octave: u32 },
    Dyadic { k_max: u32, per_octave: u32 },
    Explicit { xi: Vec<f64> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto { per_octave: 4 }
    }
}

/// `r` with `max_j |a_j| r^{α_j} = 1`; 1 for the zero phase.
pub fn normalizing_scale(q: &Fewnomial) -> f64 {
    if q.is_empty() {
        return 1.0;
    }
    q.terms().map(|(a, k)| (-a.abs().log2() / k as f64).exp2()).fold(f64::INFINITY, f64::min)
}

/// Automatic `K`: `2^{K/per_octave} >= 4 max|Q_r'|` on `[0, t_hi]`, where `t_hi` is the point
/// at which the largest normalized term reaches `2^8`.
fn auto_k(qn: &Fewnomial, per_octave: u32) -> u32 {
    let p = per_octave as f64;
    if qn.is_empty() {
        return 4 * per_octave;
    }
    let log_hi = qn.terms().map(|(a, k)| (8.0 - a.abs().log2()) / k as f64).fold(f64::INFINITY, f64::min);
    let slope: f64 = qn.terms().map(|(a, k)| k as f64 * a.abs() * (log_hi * (k as f64 - 1.0)).exp2()).sum();
    let k = (p * (4.0 * slope).log2()).ceil();
    k.clamp(4.0 * p, 40.0 * p) as u32
}

impl GridSpec {
    /// Normalized frequencies `ξ'` for the rescaled phase, ascending.
    fn normalized_points(&self, qn: &Fewnomial, r: f64) -> Result<Vec<f64>> {
        let dyadic = |k_max: u32, per_octave: u32| -> Vec<f64> {
            let mut v = vec![0.0];
            for k in -(k_max as i64)..=(k_max as i64) {
                let x = (k as f64 / per_octave as f64).exp2();
                v.push(x);
                v.push(-x);
            }
            v
        };
        let mut pts = match self {
            GridSpec::Auto { per_octave } if *per_octave > 0 => dyadic(auto_k(qn, *per_octave), *per_octave),
            GridSpec::Dyadic { k_max, per_octave } if *per_octave > 0 => dyadic(*k_max, *per_octave),
            GridSpec::Explicit { xi } if !xi.is_empty() => xi.iter().map(|x| x * r).collect(),
            _ => return Err(Error::InvalidArgument("frequency grid is empty".into())),
        };
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("frequency grid contains non-finite values".into()));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    /// Largest `|m|` over certified samples.
    pub sup: f64,
    pub argmax_xi: f64,
    /// All samples in original frequency units, ascending in `ξ`; uncertified ones are kept.
    pub samples: Vec<MultiplierSample>,
    pub certified_fraction: f64,
    /// `max |m(ξ) + iπ sgn ξ|` at the two grid extremes.
    pub asymptote_gap: f64,
    /// Normalizing factor `r`; the grid was evaluated for `Q(r t)` at `ξ' = r ξ`.
    pub scale: f64,
}

/// `sup_ξ |m(ξ)|` over the grid (parallel over `ξ`).
pub fn multiplier_sup(q: &Fewnomial, grid: &GridSpec, tol: f64) -> Result<SupReport> {
    check_tol(tol)?;
    let r = normalizing_scale(q);
    let qn = q.rescaled(r)?;
    let pts = grid.normalized_points(&qn, r)?;
    let samples: Vec<MultiplierSample> = pts
        .par_iter()
        .map(|&x| {
            let s = multiplier_sample(&qn, x, tol).unwrap_or(MultiplierSample {
                xi: x,
                value: Complex64::new(f64::NAN, f64::NAN),
                abs_err_estimate: f64::INFINITY,
                pieces_used: 0,
            });
            MultiplierSample { xi: x / r, ..s }
        })
        .collect();
    summarize(samples, tol, r)
}

fn summarize(samples: Vec<MultiplierSample>, tol: f64, scale: f64) -> Result<SupReport> {
    let certified: Vec<&MultiplierSample> = samples.iter().filter(|s| s.is_certified(tol)).collect();
    let Some(best) = certified.iter().max_by(|a, b| a.value.norm().total_cmp(&b.value.norm())) else {
        let achieved = samples.iter().map(|s| s.abs_err_estimate).fold(0.0, f64::max);
        return Err(Error::ToleranceNotMet { requested: tol, achieved });
    };
    let gap = |s: &MultiplierSample| (s.value + Complex64::new(0.0, std::f64::consts::PI * s.xi.signum())).norm();
    let mut asymptote_gap: f64 = 0.0;
    for s in [samples.first(), samples.last()].into_iter().flatten() {
        if s.xi != 0.0 && s.is_certified(tol) {
            asymptote_gap = asymptote_gap.max(gap(s));
        }
    }
    Ok(SupReport {
        sup: best.value.norm(),
        argmax_xi: best.xi,
        certified_fraction: certified.len() as f64 / samples.len() as f64,
        samples,
        asymptote_gap,
        scale,
    })
}
