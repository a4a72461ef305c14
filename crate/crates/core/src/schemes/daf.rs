//! Hybrid decode-amplify-forward.
//!
//! A relay forwards what it decoded; a relay that failed amplifies the
//! received signal instead, but only when its backward gain exceeds the
//! expected-value gate `P_r/P_s` — otherwise it stays silent and the link
//! falls back to DF.
//!
//! [`daf_throughput`] evaluates this protocol exactly (layered engine with a
//! single layer). [`daf_throughput_closed_form`] is the three-branch
//! tabulated expression, kept for comparison: its DF branch drops the
//! "relay stays silent" mass and its AF branch counts realizations the
//! protocol cannot decode, so it runs above the simulated protocol.

use super::af::{af_success, af_tables};
use super::df::df_threshold_cap;
use super::layered::{layered_expected_rate, optimize_layered, LayeredSolution, MAX_LAYERS};
use super::{streams, McSettings, RateResult};
use crate::channel::PowerConfig;
use crate::error::{Error, Result};
use crate::gains::{cached, tabulate_distribution, CacheKey, GainKind, Method, GRID_LO};
use crate::numerics::{maximize_scalar, maximize_scalar_with, Bracket};

/// Search ceiling for the single-layer threshold.
const THRESHOLD_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DafOptions {
    /// Relays never amplify (`ξ = ζ = 1`); the scheme reduces to DF.
    pub force_decode: bool,
}

pub fn daf_throughput(p: &PowerConfig) -> RateResult {
    let b = Bracket { lo: 1e-9, hi: THRESHOLD_MAX.max(df_threshold_cap(p)), tol: 1e-10 };
    let r = maximize_scalar_with(|s| layered_expected_rate(p, &LayeredSolution::single(s, p.ps, true)), b, 192);
    let s = r.argmax[0];
    let mut out = RateResult::new(r.value.max(0.0), "protocol-exact").with_param("s", s);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out
}

pub fn daf_throughput_closed_form(p: &PowerConfig) -> Result<RateResult> {
    daf_throughput_closed_form_with(p, &McSettings::default())
}

/// Three-branch closed form over tabulated `a_AF,1`, `a_AF,2`, `a_DAF`.
pub fn daf_throughput_closed_form_with(p: &PowerConfig, mc: &McSettings) -> Result<RateResult> {
    let af = af_tables(p, mc)?;
    let seed = mc.seed(streams::DAF);
    let key = CacheKey { scheme: GainKind::Daf.tag().into(), ps: p.ps, pr: p.pr, n: mc.n, seed };
    let daf = cached(mc.cache.as_ref(), key, || tabulate_distribution(GainKind::Daf, p, Method::MonteCarlo, mc.n, seed))?;
    let g = p.pr / p.ps;
    let r = p.ps / p.pr;
    let on = (-af.a_th).exp();
    let objective = |s: f64| {
        let df = (2.0 * s.exp() + 2.0 * (-g).exp() + s * r - 2.0 * (s - g).exp() - 1.0) * (-s * (2.0 + r)).exp();
        let af_branch = (on * af.af2.survival_at(s) + (1.0 - on) * af.af1.survival_at(s)) * on * (1.0 - (-s).exp()).powi(2);
        let mixed = 2.0 * (-(s + g)).exp() * (1.0 - (-s).exp()) * daf.survival_at(s * r);
        (df + af_branch + mixed) * (p.ps * s).ln_1p()
    };
    let b = Bracket::new(GRID_LO, THRESHOLD_MAX, 1e-10)?;
    let res = maximize_scalar(objective, b);
    let mut out = RateResult::new(res.value.max(0.0), "closed-form/tabulated").with_param("s", res.argmax[0]);
    out.evaluations = res.evaluations;
    out.converged = res.converged;
    // Keep the AF part visible for diagnostics.
    out.params.push(("af_success".into(), af_success(&af, res.argmax[0])));
    Ok(out)
}

pub fn daf_finite_expected_rate(k: usize, p: &PowerConfig) -> Result<RateResult> {
    daf_finite_expected_rate_with(k, p, DafOptions::default())
}

pub fn daf_finite_expected_rate_with(k: usize, p: &PowerConfig, opts: DafOptions) -> Result<RateResult> {
    if k == 0 || k > MAX_LAYERS {
        return Err(Error::UnsupportedLayers(k));
    }
    let amplify = !opts.force_decode;
    if !amplify {
        let mut r = super::df::df_finite_expected_rate(k, p)?;
        r.method = "layered-exact/forced-decode";
        return Ok(r);
    }
    let single = daf_throughput(p);
    let mut sol = LayeredSolution::single(single.param("s").unwrap(), p.ps, true);
    let mut best = single;
    best.params = vec![("k".into(), 1.0)];
    best.method = "layered-exact";
    best.solution = Some(sol.clone());
    for kk in 2..=k {
        let r = optimize_layered(p, kk, true, &sol, "layered-exact")?;
        sol = r.solution.clone().expect("layered optimizer returns a solution");
        best = r;
    }
    Ok(best)
}
