//! Dyadic scale bookkeeping.
//!
//! Scales are indexed by integers `l` (the annulus `|t| ≈ λ^l`, `λ = 2^{1/n}`). A scale is
//! *bad* for a pair of monomials when their sizes at that scale agree within a factor `2^Γ`,
//! either for the monomials themselves (level 0) or for their second derivatives (level 1,
//! weights `α(α-1)`). Everything else splits into good components, each with one monomial
//! dominating `Q` and one dominating `Q''`.
//!
//! All membership decisions go through [`is_bad`], which works on `log2` sizes so that no
//! power of `λ` is ever formed.

mod domination;
mod partition;

pub use domination::{gamma_scan, verify_domination, DominationReport, GammaScanEntry};
pub use partition::{smooth_step, PartitionOfUnity};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fewnomial::ScaleFrame;

/// Default comparability exponent `Γ`.
pub const DEFAULT_GAMMA: u32 = 8;

/// Closed integer interval `[lo, hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerInterval {
    pub lo: i64,
    pub hi: i64,
}

impl IntegerInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow);
        }
        Ok(IntegerInterval { lo, hi })
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, l: i64) -> bool {
        self.lo <= l && l <= self.hi
    }

    pub fn intersect(&self, other: &IntegerInterval) -> Option<IntegerInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(IntegerInterval { lo, hi })
    }

    pub fn hull(&self, other: &IntegerInterval) -> IntegerInterval {
        IntegerInterval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl std::fmt::Display for IntegerInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Which family of bad scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    /// Comparable monomials `|a_j λ^{α_j l}|`.
    Phase,
    /// Comparable second derivatives, weights `α_j (α_j - 1) |a_j|`.
    Curvature,
}

/// `log2` of the level weight of monomial `j` (without the `λ^{α_j l}` factor).
pub fn log2_weight(frame: &ScaleFrame, level: Level, j: usize) -> f64 {
    let base = frame.log2_abs[j];
    match level {
        Level::Phase => base,
        Level::Curvature => {
            let k = frame.exponents[j] as f64;
            base + (k * (k - 1.0)).log2()
        }
    }
}

/// `log2` of the size of monomial `j` at scale `l`.
pub fn log2_size(frame: &ScaleFrame, level: Level, j: usize, l: i64) -> f64 {
    log2_weight(frame, level, j) + (frame.exponents[j] as i64 * l) as f64 / frame.degree as f64
}

fn log2_ratio(frame: &ScaleFrame, level: Level, j1: usize, j2: usize, l: i64) -> f64 {
    let da = frame.exponents[j1] as i64 - frame.exponents[j2] as i64;
    (log2_weight(frame, level, j1) - log2_weight(frame, level, j2)) + (da * l) as f64 / frame.degree as f64
}

/// Membership test for the bad set of `(j1, j2)`: both inequalities closed, so ties are bad.
pub fn is_bad(frame: &ScaleFrame, level: Level, gamma: u32, j1: usize, j2: usize, l: i64) -> bool {
    let x = log2_ratio(frame, level, j1, j2, l);
    let g = gamma as f64;
    -g <= x && x <= g
}

fn check_pair(frame: &ScaleFrame, j1: usize, j2: usize) -> Result<()> {
    let len = frame.len();
    for j in [j1, j2] {
        if j >= len {
            return Err(Error::IndexOutOfRange { index: j, len });
        }
    }
    if j1 == j2 {
        return Err(Error::InvalidArgument("bad sets need two distinct monomials".into()));
    }
    Ok(())
}

fn bad_interval(frame: &ScaleFrame, level: Level, gamma: u32, j1: usize, j2: usize) -> Result<Option<IntegerInterval>> {
    check_pair(frame, j1, j2)?;
    if gamma == 0 {
        return Err(Error::InvalidArgument("gamma must be at least 1".into()));
    }
    let (p, q) = if j1 < j2 { (j1, j2) } else { (j2, j1) };
    // log2 ratio x(l) = c - D l / n, decreasing in l
    let d = (frame.exponents[q] - frame.exponents[p]) as f64;
    let n = frame.degree as f64;
    let c = log2_weight(frame, level, p) - log2_weight(frame, level, q);
    let g = gamma as f64;
    let mut lo = (n * (c - g) / d).ceil() as i64;
    let mut hi = (n * (c + g) / d).floor() as i64;
    let bad = |l: i64| is_bad(frame, level, gamma, p, q, l);
    while bad(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !bad(lo) {
        lo += 1;
    }
    while bad(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !bad(hi) {
        hi -= 1;
    }
    Ok((lo <= hi).then_some(IntegerInterval { lo, hi }))
}

/// Scales where monomials `j1` and `j2` are comparable within `2^Γ`.
pub fn bad_set_0(frame: &ScaleFrame, gamma: u32, j1: usize, j2: usize) -> Result<Option<IntegerInterval>> {
    bad_interval(frame, Level::Phase, gamma, j1, j2)
}

/// Same with the second-derivative weights `α(α-1)`.
pub fn bad_set_1(frame: &ScaleFrame, gamma: u32, j1: usize, j2: usize) -> Result<Option<IntegerInterval>> {
    bad_interval(frame, Level::Curvature, gamma, j1, j2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadInterval {
    pub j1: usize,
    pub j2: usize,
    #[serde(flatten)]
    pub range: IntegerInterval,
}

/// All nonempty bad intervals of both levels for one `Γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadSets {
    pub gamma: u32,
    pub level0: Vec<BadInterval>,
    pub level1: Vec<BadInterval>,
}

impl BadSets {
    pub fn new(frame: &ScaleFrame, gamma: u32) -> Result<Self> {
        let mut level0 = Vec::new();
        let mut level1 = Vec::new();
        for j1 in 0..frame.len() {
            for j2 in j1 + 1..frame.len() {
                if let Some(range) = bad_set_0(frame, gamma, j1, j2)? {
                    level0.push(BadInterval { j1, j2, range });
                }
                if let Some(range) = bad_set_1(frame, gamma, j1, j2)? {
                    level1.push(BadInterval { j1, j2, range });
                }
            }
        }
        Ok(BadSets { gamma, level0, level1 })
    }

    pub fn hull(&self) -> Option<IntegerInterval> {
        self.level0.iter().chain(&self.level1).map(|b| b.range).reduce(|a, b| a.hull(&b))
    }
}

/// A maximal run of good scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodComponent {
    #[serde(flatten)]
    pub range: IntegerInterval,
    /// Index (0-based) of the monomial dominating `Q`.
    pub j1: usize,
    /// Index (0-based) of the monomial dominating `Q''`.
    pub j2: usize,
    /// Smallest observed dominance ratio over both levels; `None` when nothing competes.
    pub margin: Option<f64>,
    pub log2_margin: f64,
    /// The component touches the lower window edge (it may continue below).
    pub clamped_lo: bool,
    pub clamped_hi: bool,
}

fn dominant(frame: &ScaleFrame, level: Level, l: i64) -> usize {
    (0..frame.len())
        .max_by(|&a, &b| log2_size(frame, level, a, l).total_cmp(&log2_size(frame, level, b, l)))
        .expect("nonempty frame")
}

/// Minimum over `l ∈ range` and `j ≠ dom` of the log2 dominance gap; linear in `l`,
/// so the endpoints suffice.
fn log2_gap(frame: &ScaleFrame, level: Level, dom: usize, range: IntegerInterval) -> f64 {
    let mut gap = f64::INFINITY;
    for l in [range.lo, range.hi] {
        let top = log2_size(frame, level, dom, l);
        for j in (0..frame.len()).filter(|&j| j != dom) {
            gap = gap.min(top - log2_size(frame, level, j, l));
        }
    }
    gap
}

/// Complement of `removed` inside `window`, as sorted disjoint intervals.
fn complement(window: IntegerInterval, removed: impl IntoIterator<Item = IntegerInterval>) -> Vec<IntegerInterval> {
    let mut cut: Vec<IntegerInterval> = removed.into_iter().filter_map(|r| r.intersect(&window)).collect();
    cut.sort_by_key(|r| r.lo);
    let mut out = Vec::new();
    let mut next = window.lo;
    for r in cut {
        if r.lo > next {
            out.push(IntegerInterval { lo: next, hi: r.lo - 1 });
        }
        next = next.max(r.hi.saturating_add(1));
    }
    if next <= window.hi {
        out.push(IntegerInterval { lo: next, hi: window.hi });
    }
    out
}

/// Good scales inside `window` after removing only the level-0 bad sets.
pub fn good_set_level0(frame: &ScaleFrame, gamma: u32, window: IntegerInterval) -> Result<Vec<IntegerInterval>> {
    let bad = BadSets::new(frame, gamma)?;
    Ok(complement(window, bad.level0.iter().map(|b| b.range)))
}

/// Maximal good components inside `window`, annotated with their dominating monomials.
pub fn good_components(frame: &ScaleFrame, gamma: u32, window: IntegerInterval) -> Result<Vec<GoodComponent>> {
    if window.lo > window.hi {
        return Err(Error::EmptyWindow);
    }
    let bad = BadSets::new(frame, gamma)?;
    let pieces = complement(window, bad.level0.iter().chain(&bad.level1).map(|b| b.range));
    Ok(pieces
        .into_iter()
        .map(|range| {
            let j1 = dominant(frame, Level::Phase, range.lo);
            let j2 = dominant(frame, Level::Curvature, range.lo);
            debug_assert_eq!(j1, dominant(frame, Level::Phase, range.hi));
            debug_assert_eq!(j2, dominant(frame, Level::Curvature, range.hi));
            let log2_margin =
                log2_gap(frame, Level::Phase, j1, range).min(log2_gap(frame, Level::Curvature, j2, range));
            GoodComponent {
                range,
                j1,
                j2,
                margin: log2_margin.is_finite().then(|| log2_margin.exp2()),
                log2_margin,
                clamped_lo: range.lo == window.lo,
                clamped_hi: range.hi == window.hi,
            }
        })
        .collect())
}

/// Working window for component extraction: the hull of all bad intervals and of the
/// first piece offsets `⌈γ_j⌉` (in `λ` units), padded by `4n` below and `12n + 4` above so
/// that the per-monomial pieces up to offset 20 stay inside.
pub fn default_window(frame: &ScaleFrame, gamma: u32) -> Result<IntegerInterval> {
    let n = frame.degree as i64;
    let mut span = BadSets::new(frame, gamma)?.hull();
    for m in &frame.monomials {
        let u = (m.piece_base() * n).div_euclid(m.exponent as i64);
        let p = IntegerInterval { lo: u, hi: u };
        span = Some(span.map_or(p, |s| s.hull(&p)));
    }
    let span = span.expect("nonempty frame");
    IntegerInterval::new(span.lo - 4 * n, span.hi + 12 * n + 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fewnomial::Fewnomial;

    fn frame(c: &[f64], e: &[u32]) -> ScaleFrame {
        Fewnomial::new(c.to_vec(), e.to_vec()).unwrap().scale_frame().unwrap()
    }

    // brute-force scan with products evaluated directly on the log scale
    fn scan(f: &ScaleFrame, level: Level, gamma: u32, j1: usize, j2: usize, span: i64) -> Vec<i64> {
        let n = f.degree as f64;
        let w = |j: usize| {
            let k = f.exponents[j] as f64;
            let extra = if level == Level::Curvature { (k * (k - 1.0)).log2() } else { 0.0 };
            f.log2_abs[j] + extra
        };
        (-span..=span)
            .filter(|&l| {
                let s1 = w(j1) + f.exponents[j1] as f64 * l as f64 / n;
                let s2 = w(j2) + f.exponents[j2] as f64 * l as f64 / n;
                s2 - gamma as f64 <= s1 && s1 <= s2 + gamma as f64
            })
            .collect()
    }

    #[test]
    fn bad0_examples() {
        let f = frame(&[1.0, 1.0], &[2, 4]);
        let b = bad_set_0(&f, 2, 0, 1).unwrap().unwrap();
        assert_eq!((b.lo, b.hi), (-4, 4));
        assert_eq!(b.len(), 9);
        assert!(b.len() <= 4 * 4 * 2);
        assert_eq!(scan(&f, Level::Phase, 2, 0, 1, 100), (-4..=4).collect::<Vec<_>>());

        let f = frame(&[2f64.powi(40), 1.0], &[2, 4]);
        let b = bad_set_0(&f, 1, 0, 1).unwrap().unwrap();
        assert_eq!((b.lo, b.hi), (78, 82));
        assert_eq!(scan(&f, Level::Phase, 1, 0, 1, 200), (78..=82).collect::<Vec<_>>());
    }

    #[test]
    fn bad1_examples() {
        let f = frame(&[1.0, 1.0], &[2, 4]);
        let b = bad_set_1(&f, 2, 0, 1).unwrap().unwrap();
        assert_eq!((b.lo, b.hi), (-9, -2));
        assert_eq!(scan(&f, Level::Curvature, 2, 0, 1, 100), (-9..=-2).collect::<Vec<_>>());

        let f = frame(&[1.0, 2f64.powi(-60)], &[2, 3]);
        let b = bad_set_1(&f, 1, 0, 1).unwrap().unwrap();
        let s = scan(&f, Level::Curvature, 1, 0, 1, 10_000);
        assert_eq!((b.lo, b.hi), (s[0], *s.last().unwrap()));
        assert_eq!(b.len() as usize, s.len());
    }

    #[test]
    fn pair_order_is_irrelevant() {
        let f = frame(&[0.3, -5.0, 2.0], &[2, 5, 9]);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(bad_set_0(&f, 3, a, b).unwrap(), bad_set_0(&f, 3, b, a).unwrap());
            assert_eq!(bad_set_1(&f, 3, a, b).unwrap(), bad_set_1(&f, 3, b, a).unwrap());
        }
    }

    #[test]
    fn bad_set_errors() {
        let f = frame(&[1.0, 1.0], &[2, 4]);
        assert!(matches!(bad_set_0(&f, 2, 0, 2), Err(Error::IndexOutOfRange { index: 2, len: 2 })));
        assert!(bad_set_0(&f, 2, 1, 1).is_err());
        assert!(bad_set_0(&f, 0, 0, 1).is_err());
        // a single monomial has no pairs at all
        let f = frame(&[3.0], &[5]);
        let bad = BadSets::new(&f, 4).unwrap();
        assert!(bad.level0.is_empty() && bad.level1.is_empty());
    }

    #[test]
    fn ties_are_bad() {
        // 2^{-2} <= 2^{-l/2} <= 2^2 holds with equality at l = ±4
        let f = frame(&[1.0, 1.0], &[2, 4]);
        assert!(is_bad(&f, Level::Phase, 2, 0, 1, 4));
        assert!(is_bad(&f, Level::Phase, 2, 0, 1, -4));
        assert!(!is_bad(&f, Level::Phase, 2, 0, 1, 5));
    }

    #[test]
    fn component_examples() {
        let f = frame(&[1.0, 1.0], &[2, 4]);
        let window = IntegerInterval::new(-50, 50).unwrap();
        let comps = good_components(&f, 2, window).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].range, IntegerInterval { lo: -50, hi: -10 });
        assert_eq!(comps[1].range, IntegerInterval { lo: 5, hi: 50 });
        // upper component: t^4 dominates both Q and Q''
        assert_eq!((comps[1].j1, comps[1].j2), (1, 1));
        // lower component: t^2 dominates both
        assert_eq!((comps[0].j1, comps[0].j2), (0, 0));
        for c in &comps {
            assert!(c.log2_margin >= 2.0);
            assert!(c.margin.unwrap() >= 4.0);
        }
        // exhaustive check of the dominance claims on each scale
        for l in 5..=50 {
            assert!((l as f64 / 2.0).exp2() >= 4.0);
        }
        for l in -50..=-10i64 {
            assert!((-l as f64 / 2.0).exp2() >= 24.0);
        }
        assert!(comps[0].clamped_lo && comps[1].clamped_hi);
    }

    #[test]
    fn single_monomial_component_is_window() {
        let f = frame(&[-7.0], &[6]);
        let window = IntegerInterval::new(-30, 40).unwrap();
        let comps = good_components(&f, 8, window).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].range, window);
        assert_eq!((comps[0].j1, comps[0].j2), (0, 0));
        assert_eq!(comps[0].margin, None);
    }

    #[test]
    fn level0_components() {
        let f = frame(&[1.0, 1.0], &[2, 4]);
        let w = IntegerInterval::new(-50, 50).unwrap();
        let g = good_set_level0(&f, 2, w).unwrap();
        assert_eq!(g, vec![IntegerInterval { lo: -50, hi: -5 }, IntegerInterval { lo: 5, hi: 50 }]);
    }

    #[test]
    fn complement_handles_overlaps() {
        let w = IntegerInterval { lo: 0, hi: 20 };
        let parts = complement(
            w,
            [IntegerInterval { lo: 3, hi: 6 }, IntegerInterval { lo: 5, hi: 9 }, IntegerInterval { lo: 20, hi: 25 }],
        );
        assert_eq!(parts, vec![IntegerInterval { lo: 0, hi: 2 }, IntegerInterval { lo: 10, hi: 19 }]);
        assert!(complement(w, [IntegerInterval { lo: -5, hi: 30 }]).is_empty());
    }

    #[test]
    fn default_window_covers_bad_sets() {
        let f = frame(&[2f64.powi(40), 1.0], &[2, 4]);
        let w = default_window(&f, 1).unwrap();
        assert!(w.contains(78) && w.contains(82));
    }
}
