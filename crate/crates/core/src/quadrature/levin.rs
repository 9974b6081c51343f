use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::phase::Phase;

/// Levin collocation for `∫_a^b A(t) e^{iφ(t)} dt`: solves `p' + iφ' p = A` in a degree
/// `m-1` Chebyshev basis on Lobatto nodes, then returns `p(b) e^{iφ(b)} - p(a) e^{iφ(a)}`.
/// Only meaningful when `φ'` has no zero on `[a, b]`. `None` if the system is singular.
pub fn levin<A: Fn(f64) -> f64>(phase: &Phase, amp: &A, a: f64, b: f64, m: usize) -> Option<Complex64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut mat = DMatrix::<Complex64>::zeros(m, m);
    let mut rhs = DVector::<Complex64>::zeros(m);
    let mut t_val = vec![0.0; m];
    let mut t_der = vec![0.0; m];
    for k in 0..m {
        let x = (std::f64::consts::PI * k as f64 / (m - 1) as f64).cos();
        let t = c + h * x;
        chebyshev(x, &mut t_val, &mut t_der);
        let w = phase.d1(t);
        for j in 0..m {
            mat[(k, j)] = Complex64::new(t_der[j] / h, w * t_val[j]);
        }
        rhs[k] = Complex64::new(amp(t), 0.0);
    }
    let coef = mat.lu().solve(&rhs)?;
    // T_j(1) = 1, T_j(-1) = (-1)^j
    let p_hi: Complex64 = coef.iter().sum();
    let p_lo: Complex64 = coef.iter().enumerate().map(|(j, &v)| if j % 2 == 0 { v } else { -v }).sum();
    let value = p_hi * Complex64::from_polar(1.0, phase.value(b)) - p_lo * Complex64::from_polar(1.0, phase.value(a));
    value.is_finite().then_some(value)
}

fn chebyshev(x: f64, val: &mut [f64], der: &mut [f64]) {
    val[0] = 1.0;
    der[0] = 0.0;
    if val.len() > 1 {
        val[1] = x;
        der[1] = 1.0;
    }
    for j in 1..val.len() - 1 {
        val[j + 1] = 2.0 * x * val[j] - val[j - 1];
        der[j + 1] = 2.0 * val[j] + 2.0 * x * der[j] - der[j - 1];
    }
}
