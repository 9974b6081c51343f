//! One PASS/FAIL line per acceptance criterion. Reference values come from closed forms
//! or from checks written here against the raw coefficients, not from library internals.
//!
//! Criteria 7 and 8 are known to fail on this ensemble; they print FAIL with their numbers
//! but do not fail the run. Every other criterion must pass.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use oscint::decomposition::{bad_set_0, bad_set_1, verify_domination, GoodComponent, IntegerInterval};
use oscint::experiments::{
    derive_seed, draw_rng, parissis_growth, random_good_components, sample_fewnomial, structure_suite, suite_instance,
    uniformity_sweep, SweepConfig,
};
use oscint::quadrature::{
    decay_fit, normalizing_scale, pv_multiplier, pv_multiplier_oracle, second_derivative_chain, stationary_xi_grid, GridSpec,
};
use oscint::Fewnomial;
use rand::Rng;

const TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Signed terms as `(sign, log2 |term|)`; the sum is formed relative to the largest.
fn log2_sum(terms: &[(f64, f64)]) -> (f64, f64) {
    let top = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|&(sg, g)| sg * (g - top).exp2()).sum();
    (s.signum(), top + s.abs().log2())
}

/// `(sign, log2 |term_j^{(order)}(x)|)` for `x = ±2^{lx}`.
fn term_log2(a: f64, k: u32, order: u32, lx: f64, negative: bool) -> (f64, f64) {
    let mut c = a.abs();
    for i in 0..order {
        c *= (k - i) as f64;
    }
    let p = k - order;
    let sign = if negative && p % 2 == 1 { -a.signum() } else { a.signum() };
    (sign, c.log2() + p as f64 * lx)
}

// 1. closed-form anchors

fn anchors() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 2..=9u32 {
        let m = pv_multiplier(&Fewnomial::monomial(1.0, k).unwrap(), 0.0, TOL).unwrap();
        let expect = if k % 2 == 1 { Complex64::new(0.0, PI / k as f64) } else { Complex64::new(0.0, 0.0) };
        worst = worst.max((m.value - expect).norm());
    }
    for xi in [1.0, -1.0, 1024.0, -1024.0] {
        let m = pv_multiplier(&Fewnomial::zero(), xi, TOL).unwrap();
        worst = worst.max((m.value.norm() - PI).abs());
    }
    outcome(worst <= 1e-6, format!("max deviation {worst:.2e} (limit 1e-6)"))
}

// 2. engine against the brute-force oracle

fn oracle_equivalence() -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_diff: f64 = 0.0;
    let mut compared = 0;
    let mut declined = 0;
    let mut draw = 0u64;
    while compared < 50 && draw < 500 {
        let s = derive_seed(7001, 0, draw);
        draw += 1;
        // d <= 3, α_d <= 10, |a| in [1e-2, 1e2]
        let d = draw_rng(s, 1).random_range(1..=3usize);
        let q = sample_fewnomial(s, d, 10, 4.0).unwrap();
        let r = normalizing_scale(&q);
        let xis = [-2.0, -0.5, 0.0, 0.75, 3.0].map(|x| x / r);
        // the oracle declines instances whose stationary phase is beyond brute force
        let Ok(refs) = xis.iter().map(|&x| pv_multiplier_oracle(&q, x, 4e-5)).collect::<Result<Vec<_>, _>>() else {
            declined += 1;
            continue;
        };
        for (&xi, o) in xis.iter().zip(&refs) {
            let e = pv_multiplier(&q, xi, TOL).unwrap();
            let diff = (e.value - o.value).norm();
            worst_diff = worst_diff.max(diff);
            worst_excess = worst_excess.max(diff - (1e-4 + e.abs_err_estimate + o.error));
        }
        compared += 1;
    }
    outcome(
        compared == 50 && worst_excess <= 0.0,
        format!("{compared} instances x 5 frequencies ({declined} draws declined by the oracle), max |engine - oracle| {worst_diff:.2e}"),
    )
}

// 3. structure suite, with bad sets rescanned from the coefficients

fn rescan(q: &Fewnomial, gamma: u32, curvature: bool, p: usize, r: usize) -> Vec<i64> {
    let n = q.degree() as f64;
    let w = |j: usize| {
        let (a, k) = (q.coeffs()[j], q.exponents()[j] as f64);
        let base = a.abs().log2() + if curvature { (k * (k - 1.0)).log2() } else { 0.0 };
        (base, if curvature { k - 2.0 } else { k })
    };
    let (wp, kp) = w(p);
    let (wq, kq) = w(r);
    (-20_000..=20_000i64)
        .filter(|&l| ((wp + kp * l as f64 / n) - (wq + kq * l as f64 / n)).abs() <= gamma as f64)
        .collect()
}

fn structure() -> Outcome {
    let seed = 11;
    let gammas = [1, 2, 4];
    let report = structure_suite(1000, seed, &gammas);
    let mut mismatches = 0;
    for i in 0..1000 {
        let (_, q) = suite_instance(seed, i);
        let frame = q.scale_frame().unwrap();
        for &g in &gammas {
            for p in 0..q.len() {
                for r in p + 1..q.len() {
                    for (curv, iv) in [(false, bad_set_0(&frame, g, p, r).unwrap()), (true, bad_set_1(&frame, g, p, r).unwrap())] {
                        let scan = rescan(&q, g, curv, p, r);
                        let contiguous = scan.windows(2).all(|w| w[1] == w[0] + 1);
                        let same = match iv {
                            None => scan.is_empty(),
                            Some(iv) => {
                                contiguous
                                    && scan.first() == Some(&iv.lo)
                                    && scan.last() == Some(&iv.hi)
                                    && iv.len() <= 4 * q.degree() as u64 * g as u64
                            }
                        };
                        if !same {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    let fails = report.total_failures();
    outcome(fails == 0 && mismatches == 0, format!("{fails} suite failures, {mismatches} rescan mismatches over 1000 instances x 3 gammas"))
}

// 4. domination on sampled good components

fn dominates(q: &Fewnomial, c: &GoodComponent) -> bool {
    let n = q.degree() as f64;
    for l in c.range.iter() {
        for i in 0..9 {
            // log2 t across [λ^{l-2}, λ^{l+1}]
            let lx = (l as f64 - 2.0 + 3.0 * i as f64 / 8.0) / n;
            for neg in [false, true] {
                let t0: Vec<_> = q.terms().map(|(a, k)| term_log2(a, k, 0, lx, neg)).collect();
                let t2: Vec<_> = q.terms().map(|(a, k)| term_log2(a, k, 2, lx, neg)).collect();
                let (_, whole0) = log2_sum(&t0);
                let (_, whole2) = log2_sum(&t2);
                if whole0 > 1.0 + t0[c.j1].1 + 1e-9 || whole2 < t2[c.j2].1 - 1.0 - 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

fn domination() -> Outcome {
    let comps = random_good_components(31, 200, 4, 40, 12.0, None).unwrap();
    let mut lib_fail = 0;
    let mut direct_fail = 0;
    for inst in &comps {
        if !verify_domination(&inst.q, &inst.component, 9).unwrap().pass {
            lib_fail += 1;
        }
        if !dominates(&inst.q, &inst.component) {
            direct_fail += 1;
        }
    }
    outcome(lib_fail == 0 && direct_fail == 0, format!("{} components, {lib_fail} library failures, {direct_fail} direct failures", comps.len()))
}

// 5. second-derivative chain

fn chain() -> Outcome {
    let pieces = IntegerInterval::new(0, 16).unwrap();
    let insts = random_good_components(41, 100, 4, 40, 12.0, Some(pieces)).unwrap();
    let mut lib_fail = 0;
    let mut direct_fail = 0;
    let mut samples = 0;
    for inst in &insts {
        let r = second_derivative_chain(&inst.q, &inst.component, pieces, 16).unwrap();
        lib_fail += r.failures;
        samples += r.samples;
        let frame = inst.q.scale_frame().unwrap();
        let m = &frame.monomials[inst.component.j1];
        let alpha = m.exponent as f64;
        for l in pieces.iter() {
            let k = m.piece_base() + l;
            for i in 1..=16 {
                // t over the open bump support (λ_{j1}^k, λ_{j1}^{k+2})
                let lx = (k as f64 + 2.0 * i as f64 / 17.0) / alpha;
                for neg in [false, true] {
                    let t2: Vec<_> = inst.q.terms().map(|(a, kk)| term_log2(a, kk, 2, lx, neg)).collect();
                    let (_, q2) = log2_sum(&t2);
                    if 2.0 * k as f64 / alpha + q2 < (l - 2) as f64 {
                        direct_fail += 1;
                    }
                }
            }
        }
    }
    outcome(
        lib_fail == 0 && direct_fail == 0 && samples > 0,
        format!("{} instances, {samples} samples, {lib_fail} library failures, {direct_fail} direct failures", insts.len()),
    )
}

// 6. piece decay

fn decay() -> Outcome {
    let l_range = IntegerInterval::new(4, 16).unwrap();
    let insts = random_good_components(51, 100, 3, 12, 6.0, Some(l_range)).unwrap();
    let mut good = 0;
    let mut deltas = Vec::new();
    for inst in &insts {
        let grid = stationary_xi_grid(&inst.q, &inst.component, l_range, 16).unwrap();
        if let Ok(fit) = decay_fit(&inst.q, &inst.component, &grid, l_range, TOL) {
            deltas.push(fit.delta_hat);
            if fit.delta_hat >= 0.25 && fit.residual <= 0.5 {
                good += 1;
            }
        }
    }
    deltas.sort_by(f64::total_cmp);
    let median = deltas.get(deltas.len() / 2).copied().unwrap_or(f64::NAN);
    let q = Fewnomial::monomial(1.0, 2).unwrap();
    let whole = GoodComponent {
        range: IntegerInterval::new(-40, 80).unwrap(),
        j1: 0,
        j2: 0,
        margin: None,
        log2_margin: f64::INFINITY,
        clamped_lo: true,
        clamped_hi: true,
    };
    let grid = stationary_xi_grid(&q, &whole, l_range, 16).unwrap();
    let fit = decay_fit(&q, &whole, &grid, l_range, TOL).unwrap();
    let quad = (0.4..=0.6).contains(&fit.delta_hat);
    outcome(
        good >= 95 && quad,
        format!("{good}/100 fits with delta >= 0.25 and residual <= 0.5 (median delta {median:.3}); t^2 delta {:.3}", fit.delta_hat),
    )
}

// 7. uniformity in the degree

fn uniformity() -> Outcome {
    let cfg = SweepConfig { seed: 2024, ..Default::default() };
    let sets = [vec![2, 3], vec![2, 8], vec![2, 20], vec![2, 50]];
    let (_, s) = uniformity_sweep(2, &sets, &cfg).unwrap();
    let maxes: Vec<String> = s.groups.iter().map(|g| format!("n={}: {:.3}", g.key, g.max_sup)).collect();
    match s.slope {
        Some(ci) => outcome(
            ci.contains(0.0),
            format!("slope {:.4}, 95% CI [{:.4}, {:.4}]; max sup {}", ci.slope, ci.lo, ci.hi, maxes.join(", ")),
        ),
        None => outcome(false, "no slope interval".into()),
    }
}

// 8. growth at ξ = 0 for full polynomials

fn parissis() -> Outcome {
    let cfg = SweepConfig { seed: 2025, draws: 100, grid: GridSpec::Explicit { xi: vec![0.0] }, ..Default::default() };
    let (_, s) = parissis_growth(&[3, 6, 12, 24], &cfg).unwrap();
    let maxes: Vec<String> = s.groups.iter().map(|g| format!("n={}: {:.3}", g.key, g.max_sup)).collect();
    match s.rank {
        Some(r) => outcome(
            r.rho > 0.0 && r.p_value < 0.01,
            format!("Spearman rho {:.3}, p {:.4} (n = {}); max sup {}", r.rho, r.p_value, r.n, maxes.join(", ")),
        ),
        None => outcome(false, "no rank correlation".into()),
    }
}

// 9. conjugation and scaling

fn symmetries() -> Outcome {
    let mut worst_conj: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    for i in 0..20u64 {
        let s = derive_seed(9001, 0, i);
        let d = draw_rng(s, 1).random_range(1..=3usize);
        let q = sample_fewnomial(s, d, 12, 4.0).unwrap();
        let r0 = normalizing_scale(&q);
        for (j, r) in [0.125, 0.5, 2.0, 8.0].into_iter().enumerate() {
            let xi = [-1.5, 0.6, 2.5, -0.3][j] / r0;
            let a = pv_multiplier(&q, xi, TOL).unwrap().value;
            let b = pv_multiplier(&q.negated(), -xi, TOL).unwrap().value;
            worst_conj = worst_conj.max((b - a.conj()).norm());
            let c = pv_multiplier(&q.rescaled(r).unwrap(), xi * r, TOL).unwrap().value;
            worst_scale = worst_scale.max((c - a).norm());
        }
    }
    outcome(
        worst_conj <= 2.0 * TOL && worst_scale <= 2.0 * TOL,
        format!("max conjugation gap {worst_conj:.2e}, max scaling gap {worst_scale:.2e} (limit {:.0e})", 2.0 * TOL),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    known_red: bool,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "closed-form anchors", limit: Some(Duration::from_secs(10)), known_red: false, run: anchors },
        Criterion { id: 2, name: "oracle equivalence", limit: Some(Duration::from_secs(300)), known_red: false, run: oracle_equivalence },
        Criterion { id: 3, name: "structure suite", limit: Some(Duration::from_secs(60)), known_red: false, run: structure },
        Criterion { id: 4, name: "domination", limit: Some(Duration::from_secs(60)), known_red: false, run: domination },
        Criterion { id: 5, name: "second-derivative chain", limit: None, known_red: false, run: chain },
        Criterion { id: 6, name: "piece decay", limit: Some(Duration::from_secs(600)), known_red: false, run: decay },
        Criterion { id: 7, name: "uniformity in the degree", limit: Some(Duration::from_secs(1800)), known_red: true, run: uniformity },
        Criterion { id: 8, name: "log n growth at zero frequency", limit: Some(Duration::from_secs(1800)), known_red: true, run: parissis },
        Criterion { id: 9, name: "conjugation and scaling", limit: None, known_red: false, run: symmetries },
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut unexpected = 0;
    for c in &criteria {
        if only.is_some_and(|o| o != c.id) {
            continue;
        }
        let start = Instant::now();
        let o = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let pass = o.pass && in_time;
        let note = if !pass && c.known_red { " [known red]" } else { "" };
        println!(
            "{} criterion {} ({}): {} [{:.1} s]{note}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            o.detail,
            elapsed.as_secs_f64()
        );
        if !pass && !c.known_red {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
