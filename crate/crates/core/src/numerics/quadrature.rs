//! Adaptive Simpson integration and fixed Gauss–Legendre rules.

use crate::error::{domain, Error, Result};

/// Maximum bisection depth of [`integrate`].
pub const MAX_DEPTH: u32 = 50;

/// `∫_lo^hi f(s) ds` to absolute accuracy `tol` by adaptive Simpson.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(domain("integrate", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(domain("integrate", format!("tol = {tol} must be > 0")));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() { Ok(v) } else { Err(Error::NonFiniteIntegrand { at: x }) }
    };
    let fa = eval(lo)?;
    let fb = eval(hi)?;
    let mid = 0.5 * (lo + hi);
    let fm = eval(mid)?;
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut eval, lo, hi, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (b - a) < 4.0 * f64::EPSILON * a.abs().max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A Gauss–Legendre rule mapped onto `[lo, hi]`.
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    x.iter().zip(&w).map(|(&xi, &wi)| (mid + half * xi, half * wi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::exp_integral_e1;

    #[test]
    fn constant() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn e1_as_integral() {
        let q = integrate(|t| (-t).exp() / t, 1.0, 50.0, 1e-12).unwrap();
        assert!((q - exp_integral_e1(1.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand() {
        let err = integrate(|t| 1.0 / t, 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn battery_of_antiderivatives() {
        use std::f64::consts::PI;
        type Case = (fn(f64) -> f64, f64, f64, f64);
        let cases: [Case; 10] = [
            (|x| x * x, 0.0, 3.0, 9.0),
            (|x| x.sin(), 0.0, PI, 2.0),
            (|x| (-x).exp(), 0.0, 10.0, 1.0 - (-10.0f64).exp()),
            (|x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
            (|x| x.sqrt(), 0.0, 4.0, 16.0 / 3.0),
            (|x| x.ln(), 1.0, std::f64::consts::E, 1.0),
            (|x| x * (-x).exp(), 0.0, 30.0, 1.0 - 31.0 * (-30.0f64).exp()),
            (|x| (1.0 + x) * (-x).exp(), 0.0, 2.0, 2.0 - 4.0 * (-2.0f64).exp()),
            (|x| x.cos().powi(2), 0.0, PI, PI / 2.0),
            (|x| 1.0 / x, 1.0, 100.0, 100.0f64.ln()),
        ];
        for (f, lo, hi, exact) in cases {
            let q = integrate(f, lo, hi, 1e-10).unwrap();
            assert!((q - exact).abs() < 1e-9, "∫[{lo},{hi}] = {q}, exact {exact}");
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre_on(8, 0.0, 2.0);
        let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(15)).sum();
        assert!((q - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
