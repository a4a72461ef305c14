//! Exponential integral and the lower real branch of the Lambert W function.

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E1(x) = ∫_x^∞ e^(−t)/t dt` for `x > 0`.
///
/// Power series below 1, modified-Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(domain("exp_integral_e1", format!("x = {x} must be > 0")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x < 1.0 { e1_series(x) } else { e1_continued_fraction(x) })
}

fn e1_series(x: f64) -> f64 {
    let mut sum = -x.ln() - EULER_GAMMA;
    let mut term = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -x / k;
        let delta = -term / k;
        sum += delta;
        if delta.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// Branch `W₋₁` of the Lambert W function: the solution `W ≤ −1` of `W e^W = x`
/// for `x ∈ [−1/e, 0)`.
pub fn lambert_w_m1(x: f64) -> Result<f64> {
    let branch_point = -(-1.0f64).exp();
    // Accept a few ulps below −1/e so that `-(-1.0).exp()` itself is valid.
    if x.is_nan() || x >= 0.0 || x < branch_point * (1.0 + 4.0 * f64::EPSILON) {
        return Err(domain("lambert_w_m1", format!("x = {x} outside [-1/e, 0)")));
    }
    let q = 1.0 + std::f64::consts::E * x;
    if q <= 0.0 {
        return Ok(-1.0);
    }

    let mut w = if x < -0.25 {
        // Series about the branch point in p = −sqrt(2(1 + e x)).
        let p = -(2.0 * q).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 || f == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).min(-1.0);
        let done = (next - w).abs() <= 1e-15 * (1.0 + w.abs());
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_rejects_nonpositive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
    }

    #[test]
    fn e1_vanishes_at_infinity() {
        assert_eq!(exp_integral_e1(f64::INFINITY).unwrap(), 0.0);
        assert!(exp_integral_e1(700.0).unwrap() < 1e-300);
    }

    #[test]
    fn e1_reference_values() {
        // Frozen from an adaptive-quadrature oracle of e^(−t)/t on [x, 50].
        assert!((exp_integral_e1(1.0).unwrap() - 0.219_383_934_395_520_3).abs() < 1e-12);
        assert!((exp_integral_e1(0.5).unwrap() - 0.559_773_594_776_160_8).abs() < 1e-12);
    }

    #[test]
    fn e1_continuous_across_method_split() {
        let below = e1_series(1.0);
        let above = e1_continued_fraction(1.0);
        assert!((below - above).abs() < 1e-13 * above);
    }

    #[test]
    fn w_branch_point_and_exact_points() {
        assert_eq!(lambert_w_m1(-(-1.0f64).exp()).unwrap(), -1.0);
        let w = lambert_w_m1(-2.0 * (-2.0f64).exp()).unwrap();
        assert!((w + 2.0).abs() < 1e-12);
    }

    #[test]
    fn w_gives_the_threshold_constant() {
        let w = lambert_w_m1(-1.0 / (2.0 * 0.5f64.exp())).unwrap();
        assert!((w + 1.756_431_208_626_170).abs() < 1e-9, "{w}");
        assert!((-(2.0 * w + 1.0) - 2.5129).abs() < 1e-4);
    }

    #[test]
    fn w_rejects_outside_domain() {
        assert!(lambert_w_m1(0.0).is_err());
        assert!(lambert_w_m1(0.1).is_err());
        assert!(lambert_w_m1(-0.4).is_err());
    }
}
