//! Sparse real polynomials `Q(t) = a_1 t^{α_1} + ... + a_d t^{α_d}` with few monomials
//! and possibly very large degree, plus the integer scale constants attached to them.
//!
//! Exponents start at 2: a linear term only shifts the frequency variable and has to be
//! removed by the caller before construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated fewnomial phase.
///
/// `d = 0` is allowed and stands for the zero phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FewnomialJson", into = "FewnomialJson")]
pub struct Fewnomial {
    coeffs: Vec<f64>,
    exponents: Vec<u32>,
}

/// Canonical JSON form: `{"coeffs":[...], "exponents":[...]}` with ascending exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewnomialJson {
    pub coeffs: Vec<f64>,
    pub exponents: Vec<u32>,
}

impl TryFrom<FewnomialJson> for Fewnomial {
    type Error = Error;

    fn try_from(raw: FewnomialJson) -> Result<Self> {
        Fewnomial::new(raw.coeffs, raw.exponents)
    }
}

impl From<Fewnomial> for FewnomialJson {
    fn from(q: Fewnomial) -> Self {
        FewnomialJson { coeffs: q.coeffs, exponents: q.exponents }
    }
}

impl Fewnomial {
    /// Validates and builds a fewnomial.
    pub fn new(coeffs: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        if coeffs.len() != exponents.len() {
            return Err(Error::LengthMismatch { coeffs: coeffs.len(), exponents: exponents.len() });
        }
        for (index, &a) in coeffs.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFiniteCoefficient { index });
            }
            if a == 0.0 {
                return Err(Error::ZeroCoefficient { index });
            }
        }
        for (index, &e) in exponents.iter().enumerate() {
            if e <= 1 {
                return Err(Error::LinearTermPresent { index, exponent: e });
            }
            if index > 0 && exponents[index - 1] >= e {
                return Err(Error::NonIncreasingExponents { index });
            }
        }
        Ok(Fewnomial { coeffs, exponents })
    }

    /// The zero phase.
    pub fn zero() -> Self {
        Fewnomial { coeffs: Vec::new(), exponents: Vec::new() }
    }

    /// Single monomial `a t^k`.
    pub fn monomial(a: f64, k: u32) -> Result<Self> {
        Self::new(vec![a], vec![k])
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fewnomial serializes")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of monomials `d`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree `n = α_d`; zero for the zero phase.
    pub fn degree(&self) -> u32 {
        self.exponents.last().copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.coeffs.iter().copied().zip(self.exponents.iter().copied())
    }

    /// `-Q`.
    pub fn negated(&self) -> Self {
        Fewnomial { coeffs: self.coeffs.iter().map(|a| -a).collect(), exponents: self.exponents.clone() }
    }

    /// `Q(r t)`, i.e. coefficients `a_j r^{α_j}`. Fails if a coefficient leaves the
    /// finite nonzero range.
    pub fn rescaled(&self, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {r}")));
        }
        let lr = r.log2();
        let coeffs: Vec<f64> = self
            .terms()
            .map(|(a, k)| a.signum() * (a.abs().log2() + k as f64 * lr).exp2())
            .collect();
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::Overflow);
        }
        Self::new(coeffs, self.exponents.clone())
    }

    /// `Q^{(order)}(t)`.
    pub fn eval(&self, t: f64, order: u32) -> Result<f64> {
        let mut acc = 0.0;
        for (a, k) in self.terms() {
            if k < order {
                continue;
            }
            let term = a * falling_factorial(k, order) * t.powi((k - order) as i32);
            if !term.is_finite() {
                return Err(Error::Overflow);
            }
            acc += term;
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(Error::Overflow)
        }
    }

    /// Integer scale constants; fails for the zero phase.
    pub fn scale_frame(&self) -> Result<ScaleFrame> {
        ScaleFrame::new(self)
    }
}

impl std::fmt::Display for Fewnomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, k)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}·t^{k}")?;
        }
        Ok(())
    }
}

/// `k (k-1) ... (k-order+1)` as a float.
pub fn falling_factorial(k: u32, order: u32) -> f64 {
    (0..order).map(|i| (k - i) as f64).product()
}

/// `2^{k/q}`, the canonical evaluation of integer powers of `2^{1/q}` used for every
/// bracketing comparison in the crate.
pub fn root2_pow(k: i64, q: u32) -> f64 {
    (k as f64 / q as f64).exp2()
}

/// Largest integer `c` with `2^{c/q} <= x`, certified by direct comparison.
fn bracket_index(x: f64, q: u32) -> i64 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut c = (q as f64 * x.log2()).floor() as i64;
    while root2_pow(c, q) > x {
        c -= 1;
    }
    while root2_pow(c + 1, q) <= x {
        c += 1;
    }
    c
}

/// Exact rational number with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        Rational { num, den }
    }

    pub fn ceil(self) -> i64 {
        self.num.div_euclid(self.den) + i64::from(self.num.rem_euclid(self.den) != 0)
    }

    pub fn floor(self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Per-monomial scale data: `λ_j = 2^{1/α_j}`, `B_j` with
/// `λ_j^{-B_j} <= |a_j| < λ_j^{-B_j+1}`, and `γ_j = B_j / α_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialScale {
    pub exponent: u32,
    pub lambda: f64,
    pub big_b: i64,
    pub gamma: Rational,
}

impl MonomialScale {
    /// `⌈γ_j⌉`, the first piece index strictly beyond the low-frequency part
    /// (offset zero when `γ_j` is an integer).
    pub fn piece_base(&self) -> i64 {
        self.gamma.ceil()
    }
}

/// Every scale constant derived from one fewnomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleFrame {
    /// Degree `n`.
    pub degree: u32,
    /// `λ = 2^{1/n}`.
    pub lambda: f64,
    /// `b_j` with `λ^{b_j} <= |a_j| < λ^{b_j+1}`.
    pub b: Vec<i64>,
    pub monomials: Vec<MonomialScale>,
    /// `log2 |a_j|`.
    pub log2_abs: Vec<f64>,
    pub exponents: Vec<u32>,
}

impl ScaleFrame {
    pub fn new(q: &Fewnomial) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::DegeneratePhase);
        }
        let n = q.degree();
        let lambda = root2_pow(1, n);
        let b = q.coeffs().iter().map(|a| bracket_index(a.abs(), n)).collect();
        let monomials = q
            .terms()
            .map(|(a, k)| {
                let big_b = -bracket_index(a.abs(), k);
                MonomialScale {
                    exponent: k,
                    lambda: root2_pow(1, k),
                    big_b,
                    gamma: Rational::new(big_b, k as i64),
                }
            })
            .collect();
        Ok(ScaleFrame {
            degree: n,
            lambda,
            b,
            monomials,
            log2_abs: q.coeffs().iter().map(|a| a.abs().log2()).collect(),
            exponents: q.exponents().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `λ^k`.
    pub fn lambda_pow(&self, k: i64) -> f64 {
        root2_pow(k, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_examples() {
        let q = Fewnomial::new(vec![1.0, 1.0], vec![2, 4]).unwrap();
        assert_eq!((q.len(), q.degree()), (2, 4));
        let q = Fewnomial::new(vec![0.5, -2.0], vec![3, 7]).unwrap();
        assert_eq!((q.len(), q.degree()), (2, 7));
        assert!(matches!(
            Fewnomial::new(vec![1.0], vec![1]),
            Err(Error::LinearTermPresent { index: 0, exponent: 1 })
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Fewnomial::new(vec![1.0, 1.0], vec![4, 4]),
            Err(Error::NonIncreasingExponents { index: 1 })
        ));
        assert!(matches!(
            Fewnomial::new(vec![1.0, 1.0], vec![5, 3]),
            Err(Error::NonIncreasingExponents { .. })
        ));
        assert!(matches!(Fewnomial::new(vec![0.0], vec![2]), Err(Error::ZeroCoefficient { index: 0 })));
        assert!(matches!(Fewnomial::new(vec![f64::NAN], vec![2]), Err(Error::NonFiniteCoefficient { .. })));
        assert!(matches!(Fewnomial::new(vec![1.0], vec![0]), Err(Error::LinearTermPresent { .. })));
        assert!(matches!(Fewnomial::new(vec![1.0], vec![2, 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn derivative_examples() {
        let q = Fewnomial::new(vec![1.0, 1.0], vec![2, 4]).unwrap();
        assert_eq!(q.eval(1.0, 2).unwrap(), 14.0);
        let q = Fewnomial::monomial(3.0, 5).unwrap();
        assert_eq!(q.eval(2.0, 2).unwrap(), 480.0);
        let q = Fewnomial::monomial(1.0, 2).unwrap();
        for t in [-3.0, 0.0, 0.5, 7.0] {
            assert_eq!(q.eval(t, 3).unwrap(), 0.0);
        }
        assert_eq!(Fewnomial::zero().eval(2.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let q = Fewnomial::monomial(1.0, 64).unwrap();
        assert_eq!(q.eval(1e10, 0), Err(Error::Overflow));
    }

    #[test]
    fn scale_frame_examples() {
        let f = Fewnomial::monomial(1.0, 2).unwrap().scale_frame().unwrap();
        assert!((f.monomials[0].lambda - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!((f.monomials[0].big_b, f.b[0]), (0, 0));
        assert_eq!(f.monomials[0].gamma.to_f64(), 0.0);

        let f = Fewnomial::monomial(2.0, 2).unwrap().scale_frame().unwrap();
        assert_eq!(f.b[0], 2);
        assert_eq!(f.monomials[0].big_b, -2);
        assert_eq!(f.monomials[0].gamma, Rational::new(-2, 2));
        assert_eq!(f.monomials[0].gamma.to_f64(), -1.0);

        let f = Fewnomial::monomial(-0.3, 2).unwrap().scale_frame().unwrap();
        assert_eq!(f.b[0], -4);
        assert_eq!(Fewnomial::zero().scale_frame(), Err(Error::DegeneratePhase));
    }

    #[test]
    fn lambda_is_root_of_two() {
        for n in 2..=64u32 {
            let f = Fewnomial::monomial(1.0, n).unwrap().scale_frame().unwrap();
            let exact = 2f64.powf(1.0 / n as f64);
            assert!((f.lambda - exact).abs() <= 4.0 * f64::EPSILON * exact);
        }
    }

    #[test]
    fn rational_rounding() {
        assert_eq!(Rational::new(-3, 2).ceil(), -1);
        assert_eq!(Rational::new(-3, 2).floor(), -2);
        assert_eq!(Rational::new(4, 2).ceil(), 2);
        assert_eq!(Rational::new(5, 3).ceil(), 2);
    }

    #[test]
    fn json_form() {
        let q = Fewnomial::from_json(r#"{"coeffs":[1,-2.5],"exponents":[2,9]}"#).unwrap();
        assert_eq!(q.coeffs(), &[1.0, -2.5]);
        assert_eq!(Fewnomial::from_json(&q.to_json()).unwrap(), q);
        assert!(Fewnomial::from_json(r#"{"coeffs":[1],"exponents":[1]}"#).is_err());
    }

    #[test]
    fn rescaling_matches_substitution() {
        let q = Fewnomial::new(vec![1.5, -0.25], vec![2, 5]).unwrap();
        let r = 1.7;
        let qr = q.rescaled(r).unwrap();
        for t in [0.3, 1.0, 2.2] {
            let lhs = qr.eval(t, 0).unwrap();
            let rhs = q.eval(r * t, 0).unwrap();
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1.0));
        }
    }
}
