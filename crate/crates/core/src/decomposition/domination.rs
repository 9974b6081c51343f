use serde::{Deserialize, Serialize};

use super::{good_components, GoodComponent, IntegerInterval};
use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;

/// Outcome of sampling the pointwise domination inequalities on one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub pass: bool,
    /// `max |Q(t)| / |a_{j1} t^{α_{j1}}|`; must stay `<= 2`.
    pub worst_q_ratio: f64,
    /// `min |Q''(t)| / |α_{j2}(α_{j2}-1) a_{j2} t^{α_{j2}-2}|`; must stay `>= 1/2`.
    pub worst_qpp_ratio: f64,
    /// `min |Q''(t)| / |a_{j1} t^{α_{j1}-2}|`, recorded only.
    pub worst_qpp_ratio_j1: f64,
    pub samples: usize,
    pub failures: usize,
    /// `(l, log2|t|, sign of t)` of the first failing sample.
    pub first_failure: Option<(i64, f64, i8)>,
}

/// `|Σ_j c_j s_j 2^{e_j}|` relative to a pivot term, with every exponent formed in log space.
fn relative_sum(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    terms.map(|(signed, log2_mag)| signed * log2_mag.exp2()).sum::<f64>().abs()
}

/// Samples `samples_per_scale` points of `[λ^{l-2}, λ^{l+1}]` (and their mirror images)
/// for every scale of the component and checks `|Q| <= 2 |a_{j1} t^{α_{j1}}|` and
/// `|Q''| >= ½ |α_{j2}(α_{j2}-1) a_{j2} t^{α_{j2}-2}|`.
pub fn verify_domination(q: &Fewnomial, comp: &GoodComponent, samples_per_scale: usize) -> Result<DominationReport> {
    if samples_per_scale < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples per scale".into()));
    }
    let d = q.len();
    if comp.j1 >= d || comp.j2 >= d {
        return Err(Error::IndexOutOfRange { index: comp.j1.max(comp.j2), len: d });
    }
    let n = q.degree() as f64;
    let a = q.coeffs();
    let e: Vec<i64> = q.exponents().iter().map(|&k| k as i64).collect();
    let la: Vec<f64> = a.iter().map(|x| x.abs().log2()).collect();
    let w: Vec<f64> = e.iter().map(|&k| (k * (k - 1)) as f64).collect();
    let (j1, j2) = (comp.j1, comp.j2);

    let mut report = DominationReport {
        pass: true,
        worst_q_ratio: 0.0,
        worst_qpp_ratio: f64::INFINITY,
        worst_qpp_ratio_j1: f64::INFINITY,
        samples: 0,
        failures: 0,
        first_failure: None,
    };
    let parity = |sign: f64, k: i64| if sign < 0.0 && k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    for l in comp.range.iter() {
        for s in 0..samples_per_scale {
            let u = (l - 2) as f64 + 3.0 * s as f64 / (samples_per_scale - 1) as f64;
            let lt = u / n;
            for sign in [1.0, -1.0] {
                // Q / (a_{j1} t^{α_{j1}})
                let rq = relative_sum((0..d).map(|j| {
                    let s = (a[j] * a[j1]).signum() * parity(sign, e[j] - e[j1]);
                    (s, la[j] - la[j1] + (e[j] - e[j1]) as f64 * lt)
                }));
                // Q'' / (w_{j2} a_{j2} t^{α_{j2}-2})
                let rpp = relative_sum((0..d).map(|j| {
                    let s = (a[j] * a[j2]).signum() * parity(sign, e[j] - e[j2]);
                    (s, (w[j] / w[j2]).log2() + la[j] - la[j2] + (e[j] - e[j2]) as f64 * lt)
                }));
                // Q'' / (a_{j1} t^{α_{j1}-2})
                let rpp1 = relative_sum((0..d).map(|j| {
                    let s = (a[j] * a[j1]).signum() * parity(sign, e[j] - e[j1]);
                    (s, w[j].log2() + la[j] - la[j1] + (e[j] - e[j1]) as f64 * lt)
                }));
                report.samples += 1;
                report.worst_q_ratio = report.worst_q_ratio.max(rq);
                report.worst_qpp_ratio = report.worst_qpp_ratio.min(rpp);
                report.worst_qpp_ratio_j1 = report.worst_qpp_ratio_j1.min(rpp1);
                if !(rq <= 2.0 && rpp >= 0.5) {
                    report.pass = false;
                    report.failures += 1;
                    report.first_failure.get_or_insert((l, lt, sign as i8));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaScanEntry {
    pub gamma: u32,
    pub components: usize,
    pub pass: bool,
    pub worst_q_ratio: f64,
    pub worst_qpp_ratio: f64,
}

/// Runs component extraction and domination sampling for each `Γ`; the smallest passing
/// `Γ` is the first entry with `pass == true` (when the list is ascending).
pub fn gamma_scan(
    q: &Fewnomial,
    gammas: &[u32],
    window: IntegerInterval,
    samples_per_scale: usize,
) -> Result<Vec<GammaScanEntry>> {
    let frame = q.scale_frame()?;
    gammas
        .iter()
        .map(|&gamma| {
            let comps: Vec<GoodComponent> = good_components(&frame, gamma, window)?;
            let mut entry =
                GammaScanEntry { gamma, components: comps.len(), pass: true, worst_q_ratio: 0.0, worst_qpp_ratio: f64::INFINITY };
            for c in &comps {
                let r = verify_domination(q, c, samples_per_scale)?;
                entry.pass &= r.pass;
                entry.worst_q_ratio = entry.worst_q_ratio.max(r.worst_q_ratio);
                entry.worst_qpp_ratio = entry.worst_qpp_ratio.min(r.worst_qpp_ratio);
            }
            Ok(entry)
        })
        .collect()
}
