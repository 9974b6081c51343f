use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{default_window, good_components, GoodComponent, IntegerInterval};
use crate::error::{Error, Result};
use crate::fewnomial::Fewnomial;

/// Generator for one draw: the ChaCha stream `stream` of key `seed`.
pub fn draw_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of draw `index` in group `group` of a run keyed by `base`; a pure function of its
/// arguments, so any record can be regenerated alone.
pub fn derive_seed(base: u64, group: u64, index: u64) -> u64 {
    let mut rng = draw_rng(base, group);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

fn random_coeffs(rng: &mut ChaCha8Rng, d: usize, coeff_decades: f64) -> Vec<f64> {
    (0..d)
        .map(|_| {
            let e: f64 = rng.random_range(-0.5..=0.5) * coeff_decades;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * 10f64.powf(e)
        })
        .collect()
}

/// `d` distinct exponents drawn uniformly from `{2..max_exp}`, coefficients with random sign
/// and `log10|a|` uniform on `[-decades/2, decades/2]`.
pub fn sample_fewnomial(seed: u64, d: usize, max_exp: u32, coeff_decades: f64) -> Result<Fewnomial> {
    if d == 0 || max_exp < 2 || d > (max_exp - 1) as usize {
        return Err(Error::InvalidDimensions(format!("need 1 <= d <= max_exp - 1, got d = {d}, max_exp = {max_exp}")));
    }
    if !(coeff_decades > 0.0 && coeff_decades.is_finite()) {
        return Err(Error::InvalidDimensions(format!("coefficient decades must be positive, got {coeff_decades}")));
    }
    let mut rng = draw_rng(seed, 0);
    let mut exps: Vec<u32> = index::sample(&mut rng, (max_exp - 1) as usize, d).into_iter().map(|i| i as u32 + 2).collect();
    exps.sort_unstable();
    let coeffs = random_coeffs(&mut rng, d, coeff_decades);
    Fewnomial::new(coeffs, exps)
}

/// Random coefficients on fixed exponents.
pub fn sample_with_exponents(seed: u64, exponents: &[u32], coeff_decades: f64) -> Result<Fewnomial> {
    if exponents.is_empty() {
        return Err(Error::InvalidDimensions("empty exponent set".into()));
    }
    if !(coeff_decades > 0.0 && coeff_decades.is_finite()) {
        return Err(Error::InvalidDimensions(format!("coefficient decades must be positive, got {coeff_decades}")));
    }
    let mut rng = draw_rng(seed, 0);
    let coeffs = random_coeffs(&mut rng, exponents.len(), coeff_decades);
    Fewnomial::new(coeffs, exponents.to_vec())
}

/// `⌈log2 d⌉ + 6`, the comparability exponent used for domination checks.
pub fn domination_gamma(d: usize) -> u32 {
    (d.max(1) as f64).log2().ceil() as u32 + 6
}

/// A fewnomial together with one of its good components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentInstance {
    pub seed: u64,
    pub q: Fewnomial,
    pub gamma: u32,
    pub component: GoodComponent,
}

/// Whether every piece `l' ∈ pieces` has its bump support where the component cutoff is 1,
/// i.e. `λ^{lo+1} <= λ_{j1}^{k}` and `λ_{j1}^{k+2} <= λ^{hi+1}`.
pub fn pieces_inside(q: &Fewnomial, comp: &GoodComponent, pieces: IntegerInterval) -> bool {
    let Ok(frame) = q.scale_frame() else {
        return false;
    };
    let m = &frame.monomials[comp.j1];
    let (n, a) = (frame.degree as i64, m.exponent as i64);
    let k_lo = m.piece_base() + pieces.lo;
    let k_hi = m.piece_base() + pieces.hi + 2;
    // compare k/α against (lo+1)/n exactly in integers
    k_lo * n >= (comp.range.lo + 1) * a && k_hi * n <= (comp.range.hi + 1) * a
}

/// Draws `count` good components: `d` uniform on `1..=d_max`, exponents up to `max_exp`,
/// `Γ = ⌈log2 d⌉ + 6`, components from the default window. With `pieces` set, only
/// components whose pieces lie where the cutoff is 1 are accepted.
pub fn random_good_components(
    seed: u64,
    count: usize,
    d_max: usize,
    max_exp: u32,
    coeff_decades: f64,
    pieces: Option<IntegerInterval>,
) -> Result<Vec<ComponentInstance>> {
    if d_max == 0 || d_max > (max_exp.saturating_sub(1)) as usize {
        return Err(Error::InvalidDimensions(format!("need 1 <= d_max <= max_exp - 1, got {d_max}, {max_exp}")));
    }
    let mut out = Vec::with_capacity(count);
    let mut draw = 0u64;
    while out.len() < count {
        if draw > 1000 * count as u64 + 1000 {
            return Err(Error::InvalidArgument("could not find enough admissible components".into()));
        }
        let s = derive_seed(seed, 1, draw);
        draw += 1;
        let mut rng = draw_rng(s, 1);
        let d = rng.random_range(1..=d_max);
        let q = sample_fewnomial(s, d, max_exp, coeff_decades)?;
        let gamma = domination_gamma(d);
        let frame = q.scale_frame()?;
        let comps = good_components(&frame, gamma, default_window(&frame, gamma)?)?;
        let admissible: Vec<GoodComponent> =
            comps.into_iter().filter(|c| pieces.is_none_or(|p| pieces_inside(&q, c, p))).collect();
        if admissible.is_empty() {
            continue;
        }
        let component = admissible[rng.random_range(0..admissible.len())];
        out.push(ComponentInstance { seed: s, q, gamma, component });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn deterministic_in_seed() {
        let a = sample_fewnomial(42, 3, 20, 12.0).unwrap();
        let b = sample_fewnomial(42, 3, 20, 12.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_fewnomial(43, 3, 20, 12.0).unwrap());
    }

    #[test]
    fn full_set_is_forced() {
        let q = sample_fewnomial(5, 9, 10, 4.0).unwrap();
        assert_eq!(q.exponents(), &(2..=10).collect::<Vec<u32>>()[..]);
    }

    #[test]
    fn coefficient_range() {
        for s in 0..200 {
            let q = sample_fewnomial(s, 2, 10, 6.0).unwrap();
            for a in q.coeffs() {
                assert!(a.abs().log10().abs() <= 3.0 + 1e-12);
            }
        }
    }

    #[test]
    fn all_exponent_pairs_occur() {
        let mut seen = BTreeSet::new();
        for s in 0..10_000 {
            let q = sample_fewnomial(derive_seed(9, 0, s), 2, 10, 2.0).unwrap();
            seen.insert(q.exponents().to_vec());
        }
        // C(9, 2) pairs from {2..10}
        assert_eq!(seen.len(), 36);
    }

    #[test]
    fn invalid_dimensions() {
        assert!(matches!(sample_fewnomial(1, 0, 10, 1.0), Err(Error::InvalidDimensions(_))));
        assert!(matches!(sample_fewnomial(1, 10, 10, 1.0), Err(Error::InvalidDimensions(_))));
        assert!(matches!(sample_fewnomial(1, 2, 10, 0.0), Err(Error::InvalidDimensions(_))));
    }

    #[test]
    fn components_respect_piece_window() {
        let pieces = IntegerInterval { lo: 0, hi: 16 };
        let inst = random_good_components(3, 10, 3, 12, 6.0, Some(pieces)).unwrap();
        assert_eq!(inst.len(), 10);
        for i in &inst {
            assert!(pieces_inside(&i.q, &i.component, pieces));
        }
    }
}
