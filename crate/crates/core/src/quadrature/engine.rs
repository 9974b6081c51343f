//! Integrator for `∫_a^b A(t) e^{iφ(t)} dt` on one interval where `φ'` is monotone and of
//! one sign: Kronrod for mild oscillation, Levin collocation for strong oscillation, and
//! bisection down to a width floor otherwise.

use num_complex::Complex64;

use super::gauss_kronrod;
use super::levin::levin;
use super::phase::Phase;

/// Phase variation (radians) up to which an interval goes straight to Kronrod.
const KRONROD_PHASE: f64 = 32.0;
/// `min|φ'| · width` from which Levin collocation is attempted.
const LEVIN_MIN_OSC: f64 = 8.0;
const LEVIN_LOW: usize = 12;
const LEVIN_HIGH: usize = 20;
const MAX_DEPTH: u32 = 60;
/// Relative width below which bisection stops and brute force takes over.
const WIDTH_FLOOR: f64 = 1.0 / 1_048_576.0;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SegmentResult {
    pub value: Complex64,
    pub error: f64,
    pub segments: usize,
}

impl std::ops::AddAssign for SegmentResult {
    fn add_assign(&mut self, o: Self) {
        self.value += o.value;
        self.error += o.error;
        self.segments += o.segments;
    }
}

pub struct Oscillatory<'a, A: Fn(f64) -> f64> {
    pub phase: &'a Phase,
    pub amp: A,
}

impl<A: Fn(f64) -> f64> Oscillatory<'_, A> {
    fn kronrod(&self, a: f64, b: f64, budget: f64, max_panels: usize) -> SegmentResult {
        let f = |t: f64| Complex64::from_polar((self.amp)(t), self.phase.value(t));
        let q = gauss_kronrod::integrate(&f, a, b, budget, max_panels);
        SegmentResult { value: q.value, error: q.error, segments: 1 }
    }

    /// Integrates over `[a, b]`, which must not contain a zero of `φ'` or `φ''` in its interior.
    pub fn segment(&self, a: f64, b: f64, budget: f64) -> SegmentResult {
        self.segment_at(a, b, budget, 0)
    }

    fn segment_at(&self, a: f64, b: f64, budget: f64, depth: u32) -> SegmentResult {
        if b <= a {
            return SegmentResult::default();
        }
        let variation = (self.phase.value(b) - self.phase.value(a)).abs();
        if variation <= KRONROD_PHASE {
            return self.kronrod(a, b, budget, 400);
        }
        if depth >= MAX_DEPTH || (b - a) <= WIDTH_FLOOR * a.abs().max(b.abs()) {
            let panels = ((variation / 2.0) as usize).clamp(400, 200_000);
            return self.kronrod(a, b, budget, panels);
        }
        let slope = self.phase.d1(a).abs().min(self.phase.d1(b).abs());
        if slope * (b - a) >= LEVIN_MIN_OSC {
            if let (Some(lo), Some(hi)) =
                (levin(self.phase, &self.amp, a, b, LEVIN_LOW), levin(self.phase, &self.amp, a, b, LEVIN_HIGH))
            {
                let error = (hi - lo).norm();
                if error <= budget {
                    return SegmentResult { value: hi, error, segments: 1 };
                }
            }
        }
        let mid = if a > 0.0 && b > 4.0 * a { (a * b).sqrt() } else { 0.5 * (a + b) };
        let mut out = self.segment_at(a, mid, 0.5 * budget, depth + 1);
        out += self.segment_at(mid, b, 0.5 * budget, depth + 1);
        out
    }

    /// Integrates over `[a, b]` split at the given interior breakpoints, spreading `budget`
    /// evenly across the pieces.
    pub fn integrate(&self, knots: &[f64], budget: f64) -> SegmentResult {
        let pieces = knots.len().saturating_sub(1).max(1);
        let share = budget / pieces as f64;
        let mut out = SegmentResult::default();
        for w in knots.windows(2) {
            out += self.segment(w[0], w[1], share);
        }
        out
    }
}

impl<A: Fn(f64) -> f64> Oscillatory<'_, A> {
    /// Like [`Oscillatory::integrate`], but pieces whose `bound(a, b)` on `|∫_a^b|` is small
    /// are skipped (smallest first) as long as their bounds sum to at most a quarter of the
    /// budget; the skipped bounds go into the error.
    pub fn integrate_bounded(&self, knots: &[f64], budget: f64, bound: impl Fn(f64, f64) -> f64) -> SegmentResult {
        let mut order: Vec<(f64, usize)> = knots.windows(2).enumerate().map(|(i, w)| (bound(w[0], w[1]), i)).collect();
        order.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut skipped = 0.0;
        let mut skip = vec![false; order.len()];
        for &(b, i) in &order {
            if !(skipped + b <= 0.25 * budget) {
                break;
            }
            skipped += b;
            skip[i] = true;
        }
        let kept = skip.iter().filter(|s| !**s).count().max(1);
        let share = 0.75 * budget / kept as f64;
        let mut out = SegmentResult { error: skipped, ..Default::default() };
        for (i, w) in knots.windows(2).enumerate() {
            if !skip[i] {
                out += self.segment(w[0], w[1], share);
            }
        }
        out
    }
}

/// Sorted knots: `a`, every listed point strictly inside `(a, b)`, `b`.
pub fn knots(a: f64, b: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![a];
    let mut inner: Vec<f64> = interior.into_iter().filter(|&t| t > a && t < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    out.extend(inner);
    out.push(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fewnomial::Fewnomial;

    #[test]
    fn stationary_quadratic_block() {
        // ∫_0^40 e^{i(t - 20)^2} dt, split at the stationary point 20
        let q = Fewnomial::monomial(1.0, 2).unwrap();
        let p = Phase::forward(&q, 40.0);
        let osc = Oscillatory { phase: &p, amp: |_t: f64| 1.0 };
        let r = osc.integrate(&knots(1e-9, 40.0, p.critical_points()), 1e-10);
        let f = |t: f64| Complex64::from_polar(1.0, p.value(t));
        let refv = gauss_kronrod::integrate(&f, 1e-9, 40.0, 1e-12, 100_000);
        assert!((r.value - refv.value).norm() < 1e-9, "{:?} {:?}", r, refv);
        assert!(r.error <= 1e-10);
    }
}
