//! Equivalent point-to-point gains of the relaying schemes and numeric
//! tabulation of their distributions.
//!
//! Each gain maps one fading realization to the scalar `a` such that the
//! destination sees `ln(1 + a·P)` for the appropriate power `P`.

mod cache;
mod table;

pub use cache::{CacheKey, TableCache};
pub(crate) use cache::cached;
pub use table::{
    af1_survival,
    isotonic_projection, tabulate_distribution, tabulate_monte_carlo, tabulate_quadrature, GainDistribution,
    GainKind, Method, TableSource, GRID_LO, GRID_POINTS, KNOT_STRIDE, MIN_MC_SAMPLES,
};

use crate::channel::{FadingSample, PowerConfig};
use crate::error::{Error, Result};

/// Both relays amplify-and-forward with Alamouti combining at the destination.
pub fn gain_af2(x: &FadingSample, p: &PowerConfig) -> f64 {
    let k1 = p.pr / (x.ar1 * p.ps + 1.0);
    let k2 = p.pr / (x.ar2 * p.ps + 1.0);
    (k1 * x.ar1 * x.a1 + k2 * x.ar2 * x.a2) / (1.0 + k1 * x.a1 + k2 * x.a2)
}

/// A single amplify-and-forward relay with backward gain `ar`, forward gain `a`.
pub fn gain_af1(ar: f64, a: f64, p: &PowerConfig) -> f64 {
    ar * a * p.pr / (1.0 + ar * p.ps + a * p.pr)
}

/// Relay 1 decoded and forwards with full power, relay 2 amplifies. The
/// destination rate is `ln(1 + P_r·a_DAF)`.
pub fn gain_daf(x: &FadingSample, p: &PowerConfig) -> f64 {
    (x.a1 + x.ar2 * p.ps * (x.a1 + x.a2)) / (1.0 + x.ar2 * p.ps + x.a2 * p.pr)
}

/// AF ON/OFF threshold on the backward gain.
pub fn af_threshold(p: &PowerConfig) -> f64 {
    p.pr / (1.0 + p.ps + p.pr)
}

/// Gaussian quantizer state at the two relays for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerParams {
    pub distortion: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl QuantizerParams {
    pub fn new(distortion: f64, ar1: f64, ar2: f64, ps: f64) -> Self {
        Self { distortion, theta1: theta(distortion, ar1, ps), theta2: theta(distortion, ar2, ps) }
    }
}

/// `θ = 1 − D/(1 + a_r·P_s)`.
#[inline]
pub fn theta(distortion: f64, ar: f64, ps: f64) -> f64 {
    1.0 - distortion / (1.0 + ar * ps)
}

/// Gain of the jointly decoded quantized relay observations.
pub fn gain_cf(ar1: f64, ar2: f64, q: &QuantizerParams, _ps: f64) -> Result<f64> {
    let d = q.distortion;
    for (relay, th) in [(1u8, q.theta1), (2u8, q.theta2)] {
        if !(th > 0.0) {
            return Err(Error::DegenerateQuantizer { relay, theta: th, distortion: d });
        }
    }
    let (t1, t2) = (q.theta1, q.theta2);
    Ok(ar1 / (1.0 + (t2 + d) / (t2 + 1.0) * d / t1) + ar2 / (1.0 + (t1 + d) / (t1 + 1.0) * d / t2))
}

/// [`gain_cf`] with `θ` clipped at zero: a relay whose quantizer swamps its
/// observation contributes nothing instead of raising an error. Identical to
/// `gain_cf` whenever both `θ > 0`.
#[inline]
pub fn gain_cf_clamped(ar1: f64, ar2: f64, distortion: f64, ps: f64) -> f64 {
    let d = distortion;
    let t1 = theta(d, ar1, ps).max(0.0);
    let t2 = theta(d, ar2, ps).max(0.0);
    let term = |ar: f64, ta: f64, tb: f64| {
        if ta == 0.0 {
            0.0
        } else {
            ar * ta * (tb + 1.0) / (ta * (tb + 1.0) + d * (tb + d))
        }
    };
    term(ar1, t1, t2) + term(ar2, t2, t1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p11() -> PowerConfig {
        PowerConfig::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn af2_examples() {
        let p = p11();
        assert_eq!(gain_af2(&FadingSample::from_gains(0.0, 0.0, 0.0, 0.0), &p), 0.0);
        let g = gain_af2(&FadingSample::from_gains(1.0, 1.0, 1.0, 1.0), &p);
        assert!((g - 0.5).abs() < 1e-15);
        // A silent second link collapses to the single-relay gain.
        let p = PowerConfig::new(2.0, 7.0).unwrap();
        let g2 = gain_af2(&FadingSample::from_gains(0.8, 0.0, 1.7, 0.0), &p);
        assert!((g2 - gain_af1(1.7, 0.8, &p)).abs() < 1e-15);
    }

    #[test]
    fn af1_examples() {
        let p = p11();
        assert_eq!(gain_af1(0.0, 3.0, &p), 0.0);
        assert!((gain_af1(1.0, 1.0, &p) - 1.0 / 3.0).abs() < 1e-15);
        let big = PowerConfig::new(1.0, 1e12).unwrap();
        assert!((gain_af1(0.7, 1.3, &big) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn daf_examples() {
        let p = p11();
        let x = FadingSample::from_gains(0.4, 0.0, 5.0, 0.0);
        assert!((gain_daf(&x, &p) - 0.4).abs() < 1e-15);
        assert!((gain_daf(&FadingSample::from_gains(1.0, 1.0, 1.0, 1.0), &p) - 1.0).abs() < 1e-15);
        assert_eq!(gain_daf(&FadingSample::from_gains(0.0, 0.0, 0.0, 0.0), &p), 0.0);
    }

    #[test]
    fn af_threshold_value() {
        assert!((af_threshold(&p11()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cf_examples() {
        let q = QuantizerParams::new(0.5, 1.0, 1.0, 1.0);
        assert!((q.theta1 - 0.75).abs() < 1e-15);
        let g = gain_cf(1.0, 1.0, &q, 1.0).unwrap();
        assert!((g - 1.354_838_709_677_419).abs() < 1e-12, "{g}");
        assert!((gain_cf_clamped(1.0, 1.0, 0.5, 1.0) - g).abs() < 1e-15);
        let q0 = QuantizerParams::new(0.3, 0.0, 0.0, 1.0);
        assert_eq!(gain_cf(0.0, 0.0, &q0, 1.0).unwrap(), 0.0);
        let tiny = QuantizerParams::new(1e-9, 0.6, 1.1, 1.0);
        assert!((gain_cf(0.6, 1.1, &tiny, 1.0).unwrap() - 1.7).abs() < 1e-8);
    }

    #[test]
    fn cf_degenerate_quantizer() {
        let q = QuantizerParams::new(3.0, 1.0, 1.0, 1.0);
        assert!(matches!(gain_cf(1.0, 1.0, &q, 1.0), Err(Error::DegenerateQuantizer { relay: 1, .. })));
        // Relay 1 swamped, relay 2 alone.
        let g = gain_cf_clamped(0.5, 4.0, 2.0, 1.0);
        let t2 = theta(2.0, 4.0, 1.0);
        assert!((g - 4.0 * t2 / (t2 + 4.0)).abs() < 1e-15);
    }

    #[test]
    fn cf_decreasing_in_distortion() {
        let mut prev = f64::INFINITY;
        for i in 1..185 {
            let d = i as f64 * 0.01;
            let g = gain_cf(0.9, 1.6, &QuantizerParams::new(d, 0.9, 1.6, 1.0), 1.0).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }
}
