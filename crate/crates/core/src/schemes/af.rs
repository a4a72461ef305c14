//! Amplify-and-forward with ON/OFF relays.
//!
//! A relay is ON when its backward gain exceeds `a_th = P_r/(1 + P_s + P_r)`.
//! The destination then sees `a_AF,2` (both ON) or `a_AF,1` (one ON); the
//! tables used here are conditional on the corresponding ON event, since the
//! ON probabilities are factored out explicitly.

use super::continuous::{continuous_expected_rate, S0Equation};
use super::{streams, McSettings, RateResult};
use crate::channel::{PowerConfig, SeedSpec};
use crate::error::Result;
use crate::gains::{
    af_threshold, cached, tabulate_distribution, CacheKey, GainDistribution, GainKind, Method, TableSource,
    GRID_LO, GRID_POINTS,
};
use crate::numerics::{logspace, maximize_scalar, Bracket};

/// Conditional gain tables of one power pair.
#[derive(Debug, Clone)]
pub struct AfTables {
    pub a_th: f64,
    /// `a_AF,1` given its relay is ON (quadrature).
    pub af1: GainDistribution,
    /// `a_AF,2` given both relays are ON (Monte Carlo).
    pub af2: GainDistribution,
}

impl AfTables {
    /// Probability that both relays are ON, and that exactly one is.
    pub fn on_probabilities(&self) -> (f64, f64) {
        let on = (-self.a_th).exp();
        (on * on, 2.0 * on * (1.0 - on))
    }

    fn hi(&self) -> f64 {
        self.af1.hi().max(self.af2.hi())
    }
}

pub fn af_tables(p: &PowerConfig, mc: &McSettings) -> Result<AfTables> {
    let af1_kind = GainKind::Af1 { gated: true };
    let af2_kind = GainKind::Af2 { gated: true };
    let key1 = CacheKey { scheme: af1_kind.tag().into(), ps: p.ps, pr: p.pr, n: 0, seed: SeedSpec::new(0, 0) };
    let af1 = cached(mc.cache.as_ref(), key1, || tabulate_distribution(af1_kind, p, Method::Quadrature, 0, SeedSpec::default()))?;
    let seed = mc.seed(streams::AF2);
    let key2 = CacheKey { scheme: af2_kind.tag().into(), ps: p.ps, pr: p.pr, n: mc.n, seed };
    let af2 = cached(mc.cache.as_ref(), key2, || tabulate_distribution(af2_kind, p, Method::MonteCarlo, mc.n, seed))?;
    Ok(AfTables { a_th: af_threshold(p), af1, af2 })
}

/// `Pr{success at threshold s}` from the tables.
pub(crate) fn af_success(t: &AfTables, s: f64) -> f64 {
    let (both, one) = t.on_probabilities();
    both * t.af2.survival_at(s) + one * t.af1.survival_at(s)
}

pub fn af_throughput(p: &PowerConfig) -> Result<RateResult> {
    af_throughput_with(p, &McSettings::default())
}

pub fn af_throughput_with(p: &PowerConfig, mc: &McSettings) -> Result<RateResult> {
    let t = af_tables(p, mc)?;
    let b = Bracket::new(GRID_LO, t.hi(), 1e-10)?;
    let r = maximize_scalar(|s| af_success(&t, s) * (p.ps * s).ln_1p(), b);
    let mut out = RateResult::new(r.value.max(0.0), "tabulated").with_param("s", r.argmax[0]);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    Ok(out)
}

/// The destination-side mixture `[2(1 − e^(−a_th))F₁ + e^(−a_th)F₂]/(2 − e^(−a_th))`,
/// i.e. the gain distribution given that at least one relay is ON.
pub fn af_mixture(t: &AfTables) -> Result<GainDistribution> {
    let on = (-t.a_th).exp();
    let grid = logspace(GRID_LO, t.hi(), GRID_POINTS);
    GainDistribution::mixture(&[(2.0 * (1.0 - on), &t.af1), (on, &t.af2)], grid, TableSource::MonteCarlo)
}

pub fn af_expected_rate(p: &PowerConfig, power_saving: bool) -> Result<RateResult> {
    af_expected_rate_with(p, power_saving, &McSettings::default())
}

pub fn af_expected_rate_with(p: &PowerConfig, power_saving: bool, mc: &McSettings) -> Result<RateResult> {
    let t = af_tables(p, mc)?;
    let mix = af_mixture(&t)?;
    let on = (-t.a_th).exp();
    let eq = if power_saving { S0Equation::PowerSaving { a_th: t.a_th } } else { S0Equation::Standard };
    let mut r = continuous_expected_rate(&mix, p.ps, on * (2.0 - on), eq)?;
    r.method = "continuous-layer/tabulated";
    r.params.push(("a_th".into(), t.a_th));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> McSettings {
        McSettings::new(200_000, 1)
    }

    #[test]
    fn on_probability_per_relay() {
        let t = af_tables(&PowerConfig::new(1.0, 1.0).unwrap(), &small()).unwrap();
        assert!(((-t.a_th).exp() - 0.716_531_310_573_789_2).abs() < 1e-12);
        let (both, one) = t.on_probabilities();
        assert!((both + one - (1.0 - (1.0 - (-t.a_th).exp()).powi(2))).abs() < 1e-15);
    }

    #[test]
    fn two_mixture_normalizations_agree() {
        // [2(e^a − 1)F₁ + F₂]/(2e^a − 1) equals the e^(−a)-weighted form.
        let a: f64 = 0.37;
        for (f1, f2) in [(0.2, 0.5), (0.9, 0.1), (0.0, 1.0)] {
            let scaled = (2.0 * (a.exp() - 1.0) * f1 + f2) / (2.0 * a.exp() - 1.0);
            let on = (-a).exp();
            let weighted = (2.0 * (1.0 - on) * f1 + on * f2) / (2.0 - on);
            assert!((scaled - weighted).abs() < 1e-15);
        }
    }

    #[test]
    fn vanishing_source_power() {
        let r = af_throughput_with(&PowerConfig::new(1e-9, 1.0).unwrap(), &small()).unwrap();
        assert!(r.value_nats < 1e-6);
    }
}
