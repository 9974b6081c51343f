use serde::{Deserialize, Serialize};

use super::IntegerInterval;

fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth nonincreasing step: 1 for `x <= 0`, 0 for `x >= 1`, `C^∞` everywhere.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let a = flat(1.0 - x);
    a / (flat(x) + a)
}

/// Telescoping partition of unity on `t ≠ 0` in the logarithmic variable
/// `u = log_base |t|`: `ψ_0(u) = g(u-1) - g(u)`, `ψ_l(u) = ψ_0(u - l)`, with `g` the
/// [`smooth_step`]. `ψ_0` is supported in `0 < u < 2`, so `ψ_l(t) ≠ 0` only for
/// `base^l < |t| < base^{l+2}`, and at most two bumps overlap any point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub base: f64,
    ln_base: f64,
}

impl PartitionOfUnity {
    pub fn new(base: f64) -> Self {
        assert!(base > 1.0 && base.is_finite(), "partition base must exceed 1");
        PartitionOfUnity { base, ln_base: base.ln() }
    }

    /// `log_base |t|`.
    pub fn log_scale(&self, t: f64) -> f64 {
        t.abs().ln() / self.ln_base
    }

    pub fn bump0(u: f64) -> f64 {
        smooth_step(u - 1.0) - smooth_step(u)
    }

    /// `ψ_l(t)`; zero at `t = 0`.
    pub fn bump(&self, l: i64, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        Self::bump0(self.log_scale(t) - l as f64)
    }

    /// Indices `l` with `ψ_l(t) > 0` (at most two).
    pub fn active(&self, t: f64) -> impl Iterator<Item = i64> {
        let u = if t == 0.0 { f64::NAN } else { self.log_scale(t) };
        let top = u.floor() as i64;
        let valid = u.is_finite();
        [top - 1, top].into_iter().filter(move |&l| valid && Self::bump0(u - l as f64) > 0.0)
    }

    /// `Φ(t) = Σ_{l ∈ range} ψ_l(t)`, summed in closed form `g(u - hi - 1) - g(u - lo)`.
    /// Equals 1 for `lo + 1 <= u <= hi + 1` and vanishes outside `lo < u < hi + 2`.
    pub fn cutoff(&self, range: IntegerInterval, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let u = self.log_scale(t);
        smooth_step(u - range.hi as f64 - 1.0) - smooth_step(u - range.lo as f64)
    }

    /// Open `|t|`-support `(base^lo, base^{hi+2})` of [`Self::cutoff`].
    pub fn cutoff_support(&self, range: IntegerInterval) -> (f64, f64) {
        ((range.lo as f64 * self.ln_base).exp(), ((range.hi + 2) as f64 * self.ln_base).exp())
    }
}
