//! Small-sample statistics: least squares, bootstrap slope intervals, rank correlation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Ordinary least squares `y ≈ a + b x`; `None` with fewer than two distinct `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

pub fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Linear-interpolated quantile of an ascending slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - i as f64) * (sorted[j] - sorted[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeInterval {
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
    pub half_width: f64,
    pub resamples: usize,
}

impl SlopeInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Slope of `stat(group values)` against the group keys, with a percentile interval from
/// resampling draws within each group (stratified bootstrap). Needs two or more groups.
pub fn bootstrap_slope<R: Rng>(
    groups: &[(f64, Vec<f64>)],
    stat: fn(&[f64]) -> f64,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Option<SlopeInterval> {
    if groups.len() < 2 || groups.iter().any(|g| g.1.is_empty()) || resamples == 0 {
        return None;
    }
    let xs: Vec<f64> = groups.iter().map(|g| g.0).collect();
    let ys: Vec<f64> = groups.iter().map(|g| stat(&g.1)).collect();
    let (_, slope) = ols(&xs, &ys)?;
    let mut slopes = Vec::with_capacity(resamples);
    let mut buf = Vec::new();
    for _ in 0..resamples {
        let ys: Vec<f64> = groups
            .iter()
            .map(|(_, v)| {
                buf.clear();
                buf.extend((0..v.len()).map(|_| v[rng.random_range(0..v.len())]));
                stat(&buf)
            })
            .collect();
        slopes.push(ols(&xs, &ys)?.1);
    }
    slopes.sort_by(f64::total_cmp);
    let alpha = 0.5 * (1.0 - level);
    let lo = quantile(&slopes, alpha);
    let hi = quantile(&slopes, 1.0 - alpha);
    Some(SlopeInterval { slope, lo, hi, half_width: 0.5 * (hi - lo), resamples })
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub rho: f64,
    /// One-sided permutation p-value for `rho > 0`.
    pub p_value: f64,
    pub permutations: usize,
    pub n: usize,
}

/// Spearman's rho with a one-sided permutation test.
pub fn spearman<R: Rng>(x: &[f64], y: &[f64], permutations: usize, rng: &mut R) -> Option<RankCorrelation> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let rx = ranks(x);
    let mut ry = ranks(y);
    let rho = pearson(&rx, &ry);
    if !rho.is_finite() {
        return None;
    }
    let mut hits = 0usize;
    for _ in 0..permutations {
        ry.shuffle(rng);
        if pearson(&rx, &ry) >= rho - 1e-12 {
            hits += 1;
        }
    }
    Some(RankCorrelation { rho, p_value: (hits + 1) as f64 / (permutations + 1) as f64, permutations, n: x.len() })
}
