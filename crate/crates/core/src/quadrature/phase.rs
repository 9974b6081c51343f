//! Phase functions `φ(t) = Σ c_j t^{β_j} + c_lin t` on `t > 0` and positive-root isolation
//! for sparse sums `Σ c_k t^{e_k}` with integer (possibly zero) exponents.

use crate::fewnomial::Fewnomial;

/// Sparse signed sum `Σ c_k t^{e_k}`, exponents strictly increasing, coefficients nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSum {
    terms: Vec<(f64, i32)>,
}

impl SparseSum {
    pub fn new(mut terms: Vec<(f64, i32)>) -> Self {
        terms.retain(|&(c, _)| c != 0.0);
        terms.sort_by_key(|&(_, e)| e);
        let mut merged: Vec<(f64, i32)> = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == e => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|&(c, _)| c != 0.0);
        SparseSum { terms: merged }
    }

    pub fn terms(&self) -> &[(f64, i32)] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, e)| c * t.powi(e)).sum()
    }

    /// Value as `(mantissa, log2 scale)` with `|mantissa| <= number of terms`, so the sign
    /// survives arguments where the terms themselves would overflow.
    fn eval_scaled(&self, log2_t: f64) -> (f64, f64) {
        let mags: Vec<f64> = self.terms.iter().map(|&(c, e)| c.abs().log2() + e as f64 * log2_t).collect();
        let top = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = self.terms.iter().zip(&mags).map(|(&(c, _), &g)| c.signum() * (g - top).exp2()).sum();
        (m, top)
    }

    /// Positive roots, ascending, as `log2 t`.
    pub fn positive_roots_log2(&self) -> Vec<f64> {
        positive_roots_log2(&self.terms)
    }

    pub fn positive_roots(&self) -> Vec<f64> {
        self.positive_roots_log2().into_iter().map(f64::exp2).collect()
    }
}

/// Rolle recursion: after dividing by `t^{e_0}` the derivative has one term fewer, and
/// between consecutive critical points the sum is monotone.
fn positive_roots_log2(terms: &[(f64, i32)]) -> Vec<f64> {
    if terms.len() < 2 {
        return Vec::new();
    }
    let e0 = terms[0].1;
    let shifted = SparseSum { terms: terms.iter().map(|&(c, e)| (c, e - e0)).collect() };
    let derivative: Vec<(f64, i32)> = shifted.terms[1..].iter().map(|&(c, e)| (c * e as f64, e - 1)).collect();
    let critical = positive_roots_log2(&derivative);

    // Every positive root has log2 t in [s_lo, s_hi]: beyond, one term outweighs
    // K times each of the others.
    let k = (shifted.terms.len() - 1) as f64;
    let (c0, _) = shifted.terms[0];
    let (cl, el) = *shifted.terms.last().unwrap();
    let mut s_lo = f64::INFINITY;
    let mut s_hi = f64::NEG_INFINITY;
    for &(c, e) in &shifted.terms[1..] {
        s_lo = s_lo.min(((c0.abs() / (k * c.abs())).log2()) / e as f64);
    }
    for &(c, e) in &shifted.terms[..shifted.terms.len() - 1] {
        s_hi = s_hi.max(((k * c.abs() / cl.abs()).log2()) / (el - e) as f64);
    }
    s_lo -= 1.0;
    s_hi += 1.0;

    let mut knots = vec![s_lo];
    knots.extend(critical.iter().copied().filter(|&s| s > s_lo && s < s_hi));
    knots.push(s_hi);

    let value = |s: f64| shifted.eval_scaled(s).0;
    let mut roots = Vec::new();
    for pair in knots.windows(2) {
        let (mut p, mut q) = (pair[0], pair[1]);
        let (mut fp, fq) = (value(p), value(q));
        if fp == 0.0 {
            roots.push(p);
            continue;
        }
        if fq == 0.0 || fp.signum() == fq.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (p + q);
            if mid <= p || mid >= q {
                break;
            }
            let fm = value(mid);
            if fm == 0.0 {
                p = mid;
                q = mid;
                break;
            }
            if fm.signum() == fp.signum() {
                p = mid;
                fp = fm;
            } else {
                q = mid;
            }
        }
        roots.push(0.5 * (p + q));
    }
    // touching roots sit at critical points without a sign change
    for &s in &critical {
        let (m, _) = shifted.eval_scaled(s);
        if m.abs() <= 64.0 * f64::EPSILON * shifted.terms.len() as f64 && s > s_lo && s < s_hi {
            roots.push(s);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    roots
}

/// `φ(t) = Σ c_j t^{β_j} + lin · t` for `t > 0`, exponents `β_j >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    coeffs: Vec<f64>,
    exponents: Vec<i32>,
    lin: f64,
}

impl Phase {
    /// `t ↦ Q(t) - ξ t`.
    pub fn forward(q: &Fewnomial, xi: f64) -> Self {
        Phase {
            coeffs: q.coeffs().to_vec(),
            exponents: q.exponents().iter().map(|&k| k as i32).collect(),
            lin: -xi,
        }
    }

    /// `t ↦ Q(-t) + ξ t`, the mirror branch on the positive half-line.
    pub fn mirrored(q: &Fewnomial, xi: f64) -> Self {
        Phase {
            coeffs: q.terms().map(|(a, k)| if k % 2 == 1 { -a } else { a }).collect(),
            exponents: q.exponents().iter().map(|&k| k as i32).collect(),
            lin: xi,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.coeffs.iter().zip(&self.exponents).map(|(&c, &e)| c * t.powi(e)).sum::<f64>() + self.lin * t
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.coeffs.iter().zip(&self.exponents).map(|(&c, &e)| c * e as f64 * t.powi(e - 1)).sum::<f64>() + self.lin
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.exponents)
            .map(|(&c, &e)| c * (e * (e - 1)) as f64 * t.powi(e - 2))
            .sum()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty() && self.lin == 0.0
    }

    fn first_derivative_sum(&self) -> SparseSum {
        let mut terms: Vec<(f64, i32)> =
            self.coeffs.iter().zip(&self.exponents).map(|(&c, &e)| (c * e as f64, e - 1)).collect();
        terms.push((self.lin, 0));
        SparseSum::new(terms)
    }

    fn second_derivative_sum(&self) -> SparseSum {
        SparseSum::new(self.coeffs.iter().zip(&self.exponents).map(|(&c, &e)| (c * (e * (e - 1)) as f64, e - 2)).collect())
    }

    /// `(t φ'(t))'`.
    fn weighted_derivative_sum(&self) -> SparseSum {
        let mut terms: Vec<(f64, i32)> =
            self.coeffs.iter().zip(&self.exponents).map(|(&c, &e)| (c * (e * e) as f64, e - 1)).collect();
        terms.push((self.lin, 0));
        SparseSum::new(terms)
    }

    /// Zeros of `φ'` and `φ''` on `t > 0`, ascending. Between consecutive points `φ'` is
    /// monotone and of one sign.
    pub fn critical_points(&self) -> Vec<f64> {
        let mut pts = self.first_derivative_sum().positive_roots();
        pts.extend(self.second_derivative_sum().positive_roots());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Zeros of `φ'''` on `t > 0`; between them `φ''` is monotone.
    pub fn third_derivative_roots(&self) -> Vec<f64> {
        SparseSum::new(
            self.coeffs
                .iter()
                .zip(&self.exponents)
                .map(|(&c, &e)| (c * (e * (e - 1) * (e - 2)) as f64, e - 3))
                .collect(),
        )
        .positive_roots()
    }

    /// Beyond this point `φ'` and `(t φ')'` keep a fixed sign, so `1 / (t φ')` is monotone
    /// and tends to zero.
    pub fn monotone_tail_start(&self) -> f64 {
        let a = self.first_derivative_sum().positive_roots();
        let b = self.weighted_derivative_sum().positive_roots();
        a.into_iter().chain(b).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_simple_sums() {
        // t^2 - 4 -> 2
        let r = SparseSum::new(vec![(-4.0, 0), (1.0, 2)]).positive_roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-13);
        // (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
        let r = SparseSum::new(vec![(-6.0, 0), (11.0, 1), (-6.0, 2), (1.0, 3)]).positive_roots();
        assert_eq!(r.len(), 3);
        for (x, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - want).abs() < 1e-10, "{r:?}");
        }
        // no positive roots
        assert!(SparseSum::new(vec![(1.0, 0), (1.0, 4)]).positive_roots().is_empty());
        assert!(SparseSum::new(vec![(3.0, 5)]).positive_roots().is_empty());
    }

    #[test]
    fn roots_with_huge_spread() {
        // 1e-30 t^50 - 1e30 t^2 has its root at t = 1e(60/48)
        let r = SparseSum::new(vec![(-1e30, 2), (1e-30, 50)]).positive_roots();
        assert_eq!(r.len(), 1);
        let want = 10f64.powf(60.0 / 48.0);
        assert!((r[0] / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn touching_root_is_found() {
        // (t - 1)^2 = t^2 - 2t + 1
        let r = SparseSum::new(vec![(1.0, 0), (-2.0, 1), (1.0, 2)]).positive_roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn critical_points_of_shifted_quadratic() {
        let q = Fewnomial::monomial(1.0, 2).unwrap();
        let p = Phase::forward(&q, 6.0);
        assert_eq!(p.critical_points(), vec![3.0]);
        let m = Phase::mirrored(&q, 6.0);
        assert!(m.critical_points().is_empty());
        assert!((p.value(3.0) - (9.0 - 18.0)).abs() < 1e-14);
        assert_eq!(p.d1(3.0), 0.0);
        assert_eq!(p.d2(1.0), 2.0);
    }

    #[test]
    fn mirrored_branch_matches_negative_argument() {
        let q = Fewnomial::new(vec![1.3, -0.7, 0.2], vec![2, 3, 5]).unwrap();
        let xi = 0.9;
        let m = Phase::mirrored(&q, xi);
        for t in [0.1, 0.8, 1.7] {
            let want = q.eval(-t, 0).unwrap() + xi * t;
            assert!((m.value(t) - want).abs() < 1e-13);
        }
    }
}
