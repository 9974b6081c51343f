use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{derive_seed, domination_gamma, draw_rng, sample_fewnomial};
use crate::decomposition::{
    bad_set_0, bad_set_1, default_window, good_components, good_set_level0, log2_size, verify_domination, Level,
};
use crate::error::Result;
use crate::fewnomial::{Fewnomial, ScaleFrame};

pub const CHECKS: [&str; 7] = [
    "bad_set_equality",
    "connected",
    "cardinality",
    "components_level0",
    "components_all",
    "dominance",
    "domination_sampled",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

/// Everything needed to rerun one failing check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub seed: u64,
    pub gamma: u32,
    pub check: String,
    pub fewnomial: Fewnomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub instances: usize,
    pub seed: u64,
    pub gammas: Vec<u32>,
    pub checks: BTreeMap<String, CheckCount>,
    pub failures: Vec<FailureRecord>,
}

impl PropertyReport {
    pub fn total_failures(&self) -> usize {
        self.checks.values().map(|c| c.failed).sum()
    }
}

/// Scans `l` over a range that provably contains the bad set, comparing `log2` sizes
/// formed term by term.
fn scan_bad(frame: &ScaleFrame, level: Level, gamma: u32, p: usize, q: usize) -> Vec<i64> {
    let n = frame.degree as f64;
    let w = |j: usize| {
        let k = frame.exponents[j] as f64;
        frame.log2_abs[j] + if level == Level::Curvature { (k * (k - 1.0)).log2() } else { 0.0 }
    };
    let g = gamma as f64;
    // |x(l)| <= Γ forces |l| <= n (Γ + |w_p - w_q|) since the exponent gap is >= 1
    let reach = (n * (g + (w(p) - w(q)).abs())).ceil() as i64 + 2;
    (-reach..=reach)
        .filter(|&l| {
            let sp = w(p) + frame.exponents[p] as f64 * l as f64 / n;
            let sq = w(q) + frame.exponents[q] as f64 * l as f64 / n;
            (sp - sq).abs() <= g
        })
        .collect()
}

/// The structural battery for one `(Q, Γ)`; `(check, passed)` in [`CHECKS`] order
/// (without the sampled domination check, which uses its own `Γ`).
pub fn check_instance(q: &Fewnomial, gamma: u32) -> Result<Vec<(&'static str, bool)>> {
    let frame = q.scale_frame()?;
    let d = frame.len();
    let n = frame.degree as u64;
    let mut equal = true;
    let mut connected = true;
    let mut cardinality = true;
    for p in 0..d {
        for r in p + 1..d {
            for (level, iv) in [(Level::Phase, bad_set_0(&frame, gamma, p, r)?), (Level::Curvature, bad_set_1(&frame, gamma, p, r)?)] {
                let scanned = scan_bad(&frame, level, gamma, p, r);
                connected &= scanned.windows(2).all(|w| w[1] == w[0] + 1);
                match iv {
                    None => equal &= scanned.is_empty(),
                    Some(iv) => {
                        equal &= scanned.first() == Some(&iv.lo) && scanned.last() == Some(&iv.hi) && scanned.len() as u64 == iv.len();
                        cardinality &= iv.len() <= 4 * n * gamma as u64;
                    }
                }
            }
        }
    }
    let window = default_window(&frame, gamma)?;
    let level0 = good_set_level0(&frame, gamma, window)?;
    let comps = good_components(&frame, gamma, window)?;
    let mut dominance = true;
    for c in &comps {
        for l in c.range.iter() {
            for (level, dom) in [(Level::Phase, c.j1), (Level::Curvature, c.j2)] {
                let top = log2_size(&frame, level, dom, l);
                dominance &= (0..d).filter(|&j| j != dom).all(|j| top - log2_size(&frame, level, j, l) > gamma as f64);
            }
        }
    }
    Ok(vec![
        ("bad_set_equality", equal),
        ("connected", connected),
        ("cardinality", cardinality),
        ("components_level0", level0.len() <= d * d),
        ("components_all", comps.len() <= d.pow(4)),
        ("dominance", dominance),
    ])
}

/// Sampled domination on every good component at `Γ = ⌈log2 d⌉ + 6`, 9 points per scale.
pub fn check_domination(q: &Fewnomial) -> Result<bool> {
    let frame = q.scale_frame()?;
    let gamma = domination_gamma(frame.len());
    let comps = good_components(&frame, gamma, default_window(&frame, gamma)?)?;
    for c in &comps {
        if !verify_domination(q, c, 9)?.pass {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random instance `index` of a suite keyed by `seed`: `d ∈ 1..=4`, `n ∈ [d+1, 40]`,
/// twelve coefficient decades.
pub fn suite_instance(seed: u64, index: u64) -> (u64, Fewnomial) {
    let s = derive_seed(seed, 2, index);
    let mut rng = draw_rng(s, 1);
    let d = rng.random_range(1..=4usize);
    let max_exp = rng.random_range(d as u32 + 1..=40);
    let q = sample_fewnomial(s, d, max_exp, 12.0).expect("valid dimensions");
    (s, q)
}

/// Runs the battery on `instances` random fewnomials for each `Γ`, plus the sampled
/// domination check once per instance.
pub fn structure_suite(instances: usize, seed: u64, gammas: &[u32]) -> PropertyReport {
    let outcomes: Vec<Vec<(String, bool, FailureRecord)>> = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let (s, q) = suite_instance(seed, i);
            let mut out = Vec::new();
            let record = |gamma: u32, check: &str| FailureRecord { seed: s, gamma, check: check.to_string(), fewnomial: q.clone() };
            for &g in gammas {
                match check_instance(&q, g) {
                    Ok(checks) => out.extend(checks.into_iter().map(|(c, ok)| (c.to_string(), ok, record(g, c)))),
                    Err(_) => out.push(("bad_set_equality".to_string(), false, record(g, "bad_set_equality"))),
                }
            }
            let g = domination_gamma(q.len());
            let ok = check_domination(&q).unwrap_or(false);
            out.push(("domination_sampled".to_string(), ok, record(g, "domination_sampled")));
            out
        })
        .collect();
    let mut checks: BTreeMap<String, CheckCount> = CHECKS.iter().map(|c| (c.to_string(), CheckCount::default())).collect();
    let mut failures = Vec::new();
    for (name, ok, rec) in outcomes.into_iter().flatten() {
        let e = checks.entry(name).or_default();
        if ok {
            e.passed += 1;
        } else {
            e.failed += 1;
            failures.push(rec);
        }
    }
    PropertyReport { instances, seed, gammas: gammas.to_vec(), checks, failures }
}

/// Reruns the check named in a failure record; `Some(passed)`.
pub fn replay(f: &FailureRecord) -> Result<Option<bool>> {
    if f.check == "domination_sampled" {
        return check_domination(&f.fewnomial).map(Some);
    }
    Ok(check_instance(&f.fewnomial, f.gamma)?.into_iter().find(|(c, _)| *c == f.check).map(|(_, ok)| ok))
}
