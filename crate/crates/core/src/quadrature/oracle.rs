//! Brute-force reference for the multiplier: composite Simpson over `[0, T]` cut into
//! geometric panels, each on a uniform grid sized by a bound on `|φ'|` there, all grids
//! doubling together until two successive (Richardson-extrapolated) passes agree. Shares
//! no code with the engine. Instances whose grids would outgrow the node budget are
//! declined with `ToleranceNotMet`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;

const MAX_NODES: usize = 1 << 26;
const PANELS: i32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    /// Last doubling difference plus the analytic tail bound.
    pub error: f64,
    pub nodes: usize,
}

struct Branches {
    // (coefficient of t^k in Q(t) - ξt, same for Q(-t) + ξt, k)
    terms: Vec<(f64, f64, i32)>,
}

impl Branches {
    fn new(q: &Fewnomial, xi: f64) -> Self {
        let mut terms: Vec<(f64, f64, i32)> = q
            .coeffs()
            .iter()
            .zip(q.exponents())
            .map(|(&a, &k)| (a, if k % 2 == 0 { a } else { -a }, k as i32))
            .collect();
        if xi != 0.0 {
            terms.push((-xi, xi, 1));
        }
        Branches { terms }
    }

    fn phases(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut m = 0.0;
        for &(cp, cm, k) in &self.terms {
            let tk = t.powi(k);
            p += cp * tk;
            m += cm * tk;
        }
        (p, m)
    }

    fn slopes(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut m = 0.0;
        for &(cp, cm, k) in &self.terms {
            let tk = k as f64 * t.powi(k - 1);
            p += cp * tk;
            m += cm * tk;
        }
        (p, m)
    }

    /// `Σ |c_k| k b^{k-1}`, an upper bound for `|φ'|` on `[0, b]` in both branches.
    fn slope_bound(&self, b: f64) -> f64 {
        self.terms.iter().map(|&(c, _, k)| c.abs() * k as f64 * b.powi(k - 1)).sum()
    }

    /// `(tφ')'` for both branches.
    fn weighted_slopes(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut m = 0.0;
        for &(cp, cm, k) in &self.terms {
            let tk = (k * k) as f64 * t.powi(k - 1);
            p += cp * tk;
            m += cm * tk;
        }
        (p, m)
    }

    /// Cauchy bound: every positive zero of `φ'` or `(tφ')'` (either branch) lies below the
    /// positive root of `|c_top| t^{top} = Σ_{others} |c_k| t^k`.
    fn cauchy_radius(&self) -> f64 {
        let Some(&(top, _, kt)) = self.terms.iter().max_by_key(|t| t.2) else {
            return 1.0;
        };
        let excess = |t: f64| {
            top.abs() * t.powi(kt) - self.terms.iter().filter(|x| x.2 != kt).map(|&(c, _, k)| c.abs() * t.powi(k)).sum::<f64>()
        };
        let mut hi = 1.0;
        while excess(hi) <= 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Last sign change of `φ'` or `(tφ')'` in either branch, scanned on a fine geometric
    /// grid below the Cauchy bound. Beyond it `1/(tφ')` is monotone in both branches.
    fn monotone_radius(&self) -> f64 {
        let top = self.cauchy_radius() * 1.001;
        let step = (1.0f64 / 256.0).exp2();
        let signs = |t: f64| {
            let (a, b) = self.slopes(t);
            let (c, d) = self.weighted_slopes(t);
            [a > 0.0, b > 0.0, c > 0.0, d > 0.0]
        };
        let mut t = top;
        let reference = signs(t);
        while t > top * 1e-12 {
            let next = t / step;
            if signs(next) != reference {
                return t;
            }
            t = next;
        }
        0.0
    }
}

/// Reference value of `m(ξ)` to within `tol`.
pub fn pv_multiplier_oracle(q: &Fewnomial, xi: f64, tol: f64) -> Result<OracleValue> {
    if q.is_empty() && xi == 0.0 {
        return Ok(OracleValue { value: Complex64::new(0.0, 0.0), error: 0.0, nodes: 0 });
    }
    let br = Branches::new(q, xi);
    let tail = |t: f64| {
        let (p, m) = br.slopes(t);
        2.0 / (p.abs() * t) + 2.0 / (m.abs() * t)
    };
    let mut big_t = br.monotone_radius().max(1e-3);
    while !(tail(big_t) < tol / 2.0) {
        big_t *= 1.25;
        if !big_t.is_finite() {
            return Err(Error::Overflow);
        }
    }
    let tail_bound = tail(big_t);

    let f = |t: f64| -> Complex64 {
        if t == 0.0 {
            // (e^{iφ₊} - e^{iφ₋}) / t → i(φ₊'(0) - φ₋'(0)) = -2iξ
            return Complex64::new(0.0, -2.0 * xi);
        }
        let (p, m) = br.phases(t);
        (Complex64::from_polar(1.0, p) - Complex64::from_polar(1.0, m)) / t
    };
    // panels [T 2^{-j-1}, T 2^{-j}] and a last one down to 0, each starting at about two
    // nodes per radian of its fastest oscillation
    let mut edges: Vec<f64> = (0..=PANELS).map(|j| big_t * (-j as f64).exp2()).collect();
    edges.push(0.0);
    edges.reverse();
    let counts: Vec<usize> = edges
        .windows(2)
        .map(|w| {
            let n = (2.0 * (w[1] - w[0]) * br.slope_bound(w[1])).ceil().max(16.0);
            if n > MAX_NODES as f64 { MAX_NODES } else { (n as usize).next_multiple_of(2) }
        })
        .collect();
    if counts.iter().sum::<usize>() > MAX_NODES / 4 {
        // the grid would have to double past the node budget: outside the oracle's reach
        return Err(Error::ToleranceNotMet { requested: tol, achieved: f64::INFINITY });
    }
    let mut grids: Vec<Grid> = edges.windows(2).zip(&counts).map(|(w, &n)| Grid::new(&f, w[0], w[1], n)).collect();
    // Simpson values on successive grids, extrapolated one Richardson step (`h^6`)
    let mut simpson_prev: Complex64 = grids.iter().map(Grid::simpson).sum();
    let mut rich_prev: Option<Complex64> = None;
    loop {
        let total: usize = grids.iter().map(|g| 2 * g.n).sum();
        if total > MAX_NODES {
            return Err(Error::ToleranceNotMet { requested: tol, achieved: f64::INFINITY });
        }
        grids.iter_mut().for_each(|g| g.refine(&f));
        let simpson_cur: Complex64 = grids.iter().map(Grid::simpson).sum();
        let rich = simpson_cur + (simpson_cur - simpson_prev) / 15.0;
        if let Some(r) = rich_prev {
            let diff = (rich - r).norm();
            if diff < tol / 2.0 {
                return Ok(OracleValue { value: rich, error: diff + tail_bound, nodes: total });
            }
        }
        simpson_prev = simpson_cur;
        rich_prev = Some(rich);
    }
}

/// Uniform grid of `n` steps on `[a, b]`, keeping the node sums so that halving the step
/// only evaluates the new midpoints.
struct Grid {
    a: f64,
    b: f64,
    n: usize,
    ends: Complex64,
    /// Nodes at odd indices.
    odd: Complex64,
    /// Interior nodes at even indices.
    even: Complex64,
}

impl Grid {
    fn new<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        let mut g = Grid { a, b, n, ends: f(a) + f(b), odd: Complex64::new(0.0, 0.0), even: Complex64::new(0.0, 0.0) };
        for i in 1..n {
            if i % 2 == 1 {
                g.odd += f(a + i as f64 * h);
            } else {
                g.even += f(a + i as f64 * h);
            }
        }
        g
    }

    fn refine<F: Fn(f64) -> Complex64>(&mut self, f: &F) {
        let n = 2 * self.n;
        let h = (self.b - self.a) / n as f64;
        let fresh: Complex64 = (0..self.n).map(|i| f(self.a + (2 * i + 1) as f64 * h)).sum();
        self.even += self.odd;
        self.odd = fresh;
        self.n = n;
    }

    fn simpson(&self) -> Complex64 {
        let h = (self.b - self.a) / self.n as f64;
        (self.ends + self.odd * 4.0 + self.even * 2.0) * (h / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cubic_anchor() {
        let q = Fewnomial::monomial(1.0, 3).unwrap();
        let r = pv_multiplier_oracle(&q, 0.0, 1e-5).unwrap();
        assert!((r.value - Complex64::new(0.0, PI / 3.0)).norm() < 1e-4, "{r:?}");
    }

    #[test]
    fn even_quadratic_is_zero() {
        let q = Fewnomial::monomial(1.0, 2).unwrap();
        let r = pv_multiplier_oracle(&q, 0.0, 1e-5).unwrap();
        assert!(r.value.norm() < 1e-4);
    }
}
