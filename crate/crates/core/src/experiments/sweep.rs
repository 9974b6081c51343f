use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{derive_seed, sample_fewnomial, sample_with_exponents};
use super::stats::{self, RankCorrelation, SlopeInterval};
use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;
use crate::quadrature::{multiplier_sup, GridSpec};

/// Groups with fewer records are left out of trend statistics.
pub const MIN_GROUP: usize = 20;
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const PERMUTATIONS: usize = 9999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub seed: u64,
    pub d: usize,
    pub n: u32,
    pub exponents: Vec<u32>,
    pub coeff_decades: f64,
    pub sup: f64,
    pub argmax_xi: f64,
    pub certified_fraction: f64,
    /// Seconds; 0 unless timing was requested, so that output stays reproducible.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub draws: usize,
    pub coeff_decades: f64,
    pub grid: GridSpec,
    pub tol: f64,
    pub seed: u64,
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { draws: 50, coeff_decades: 12.0, grid: GridSpec::default(), tol: 1e-6, seed: 0, timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub key: u32,
    /// Records in the group.
    pub count: usize,
    /// Records with `certified_fraction == 1`, the only ones entering statistics.
    pub certified: usize,
    pub max_sup: f64,
    pub median_sup: f64,
    /// `certified >= MIN_GROUP`.
    pub in_trend: bool,
}

/// `max_sup ≈ a (ln key)^c` over groups with `key >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    /// `"n"` or `"d"`.
    pub key: String,
    pub groups: Vec<GroupStats>,
    /// OLS slope of `max_sup` against `log2 key` with a stratified bootstrap interval.
    pub slope: Option<SlopeInterval>,
    /// Spearman correlation of per-record `sup` with `ln key`.
    pub rank: Option<RankCorrelation>,
    /// Whether `max_sup` strictly increases along the trend groups.
    pub max_increasing: bool,
    pub power_fit: Option<PowerFit>,
    pub exploratory: bool,
}

struct Job {
    seed: u64,
    q: Fewnomial,
    decades: f64,
}

fn run_jobs(jobs: Vec<Job>, cfg: &SweepConfig) -> Vec<SweepRecord> {
    let mut out: Vec<SweepRecord> = jobs
        .into_par_iter()
        .map(|job| {
            let start = Instant::now();
            let res = multiplier_sup(&job.q, &cfg.grid, cfg.tol);
            let wall_time = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            let (sup, argmax_xi, certified_fraction) = match res {
                Ok(r) => (r.sup, r.argmax_xi, r.certified_fraction),
                Err(_) => (f64::NAN, f64::NAN, 0.0),
            };
            SweepRecord {
                seed: job.seed,
                d: job.q.len(),
                n: job.q.degree(),
                exponents: job.q.exponents().to_vec(),
                coeff_decades: job.decades,
                sup,
                argmax_xi,
                certified_fraction,
                wall_time,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.n, a.d, &a.exponents, a.seed).cmp(&(b.n, b.d, &b.exponents, b.seed)));
    out
}

fn check_config(cfg: &SweepConfig) -> Result<()> {
    if cfg.draws == 0 {
        return Err(Error::InvalidDimensions("draws must be positive".into()));
    }
    if !(cfg.coeff_decades > 0.0) {
        return Err(Error::InvalidDimensions("coefficient decades must be positive".into()));
    }
    Ok(())
}

/// Groups certified records by `key`, then computes the trend statistics. Only records with
/// `certified_fraction == 1` are used.
pub fn summarize(records: &[SweepRecord], key_name: &str, key: fn(&SweepRecord) -> u32, seed: u64) -> GrowthSummary {
    let mut keys: Vec<u32> = records.iter().map(key).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut groups = Vec::new();
    let mut trend: Vec<(f64, Vec<f64>)> = Vec::new();
    for &k in &keys {
        let all: Vec<&SweepRecord> = records.iter().filter(|r| key(r) == k).collect();
        let sups: Vec<f64> = all.iter().filter(|r| r.certified_fraction == 1.0).map(|r| r.sup).collect();
        let in_trend = sups.len() >= MIN_GROUP;
        groups.push(GroupStats {
            key: k,
            count: all.len(),
            certified: sups.len(),
            max_sup: if sups.is_empty() { f64::NAN } else { stats::max(&sups) },
            median_sup: stats::median(&sups),
            in_trend,
        });
        if in_trend {
            trend.push(((k as f64).log2(), sups));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let slope = stats::bootstrap_slope(&trend, stats::max, BOOTSTRAP_RESAMPLES, 0.95, &mut rng);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        trend.iter().flat_map(|(x, v)| v.iter().map(move |&y| (x * std::f64::consts::LN_2, y))).unzip();
    let rank = stats::spearman(&xs, &ys, PERMUTATIONS, &mut rng);
    let maxima: Vec<f64> = groups.iter().filter(|g| g.in_trend).map(|g| g.max_sup).collect();
    let max_increasing = maxima.len() >= 2 && maxima.windows(2).all(|w| w[1] > w[0]);
    GrowthSummary { key: key_name.to_string(), groups, slope, rank, max_increasing, power_fit: None, exploratory: false }
}

/// Fixed `d`, varying exponent sets (hence `n`): `cfg.draws` coefficient draws per set.
pub fn uniformity_sweep(d: usize, exponent_sets: &[Vec<u32>], cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, GrowthSummary)> {
    check_config(cfg)?;
    if exponent_sets.is_empty() {
        return Err(Error::InvalidDimensions("no exponent sets".into()));
    }
    if let Some(bad) = exponent_sets.iter().find(|s| s.len() != d) {
        return Err(Error::InvalidDimensions(format!("exponent set {bad:?} does not have {d} elements")));
    }
    let mut jobs = Vec::new();
    for (g, set) in exponent_sets.iter().enumerate() {
        for i in 0..cfg.draws {
            let seed = derive_seed(cfg.seed, g as u64, i as u64);
            jobs.push(Job { seed, q: sample_with_exponents(seed, set, cfg.coeff_decades)?, decades: cfg.coeff_decades });
        }
    }
    let records = run_jobs(jobs, cfg);
    let summary = summarize(&records, "n", |r| r.n, cfg.seed);
    Ok((records, summary))
}

/// Full polynomials `Σ_{k=2}^{n} a_k t^k` for each `n` (no linear term).
pub fn parissis_growth(n_values: &[u32], cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, GrowthSummary)> {
    check_config(cfg)?;
    if n_values.is_empty() || n_values.iter().any(|&n| n < 2) || n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDimensions("degrees must be >= 2 and strictly ascending".into()));
    }
    let mut jobs = Vec::new();
    for &n in n_values {
        let exps: Vec<u32> = (2..=n).collect();
        for i in 0..cfg.draws {
            let seed = derive_seed(cfg.seed, n as u64, i as u64);
            jobs.push(Job { seed, q: sample_with_exponents(seed, &exps, cfg.coeff_decades)?, decades: cfg.coeff_decades });
        }
    }
    let records = run_jobs(jobs, cfg);
    let summary = summarize(&records, "n", |r| r.n, cfg.seed);
    Ok((records, summary))
}

/// Random `d`-term fewnomials with exponents up to `max_exp` for each `d`, with an
/// exploratory fit `max_sup ≈ a (ln d)^c` over `d >= 2`.
pub fn logd_scan(d_values: &[usize], max_exp: u32, cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, GrowthSummary)> {
    check_config(cfg)?;
    if d_values.is_empty() || d_values.iter().any(|&d| d == 0 || d + 1 > max_exp as usize) {
        return Err(Error::InvalidDimensions(format!("need 1 <= d <= max_exp - 1 for every d, max_exp = {max_exp}")));
    }
    let mut jobs = Vec::new();
    for &d in d_values {
        for i in 0..cfg.draws {
            let seed = derive_seed(cfg.seed, d as u64, i as u64);
            jobs.push(Job { seed, q: sample_fewnomial(seed, d, max_exp, cfg.coeff_decades)?, decades: cfg.coeff_decades });
        }
    }
    let records = run_jobs(jobs, cfg);
    let mut summary = summarize(&records, "d", |r| r.d as u32, cfg.seed);
    let pts: Vec<(f64, f64)> = summary
        .groups
        .iter()
        .filter(|g| g.key >= 2 && g.max_sup.is_finite() && g.max_sup > 0.0)
        .map(|g| ((g.key as f64).ln().ln(), g.max_sup.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    summary.power_fit = stats::ols(&xs, &ys).map(|(ln_a, c)| PowerFit { a: ln_a.exp(), c });
    summary.exploratory = true;
    Ok((records, summary))
}

/// CSV with header `seed,d,n,exponents,coeff_decades,sup,argmax_xi,certified_fraction,wall_time`;
/// exponents are `;`-separated.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    wr.write_record(["seed", "d", "n", "exponents", "coeff_decades", "sup", "argmax_xi", "certified_fraction", "wall_time"])
        .map_err(io)?;
    for r in records {
        let exps: Vec<String> = r.exponents.iter().map(u32::to_string).collect();
        wr.write_record([
            r.seed.to_string(),
            r.d.to_string(),
            r.n.to_string(),
            exps.join(";"),
            r.coeff_decades.to_string(),
            r.sup.to_string(),
            r.argmax_xi.to_string(),
            r.certified_fraction.to_string(),
            r.wall_time.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Parse(e.to_string()))
}
