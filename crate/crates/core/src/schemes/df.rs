//! Decode-and-forward: single-layer throughput in closed form, finite-layer
//! expected rate through the layered engine.

use super::layered::{layered_expected_rate, optimize_layered, LayeredSolution, MAX_LAYERS};
use super::RateResult;
use crate::channel::PowerConfig;
use crate::error::{Error, Result};
use crate::numerics::{maximize_scalar, Bracket};

/// Largest optimal threshold ever needed: the throughput objective decreases
/// beyond this point for every power pair.
const THRESHOLD_CEILING: f64 = 1.212;

/// Upper end `min{2P_r/P_s, 1.212}` of the threshold search.
pub fn df_threshold_cap(p: &PowerConfig) -> f64 {
    (2.0 * p.pr / p.ps).min(THRESHOLD_CEILING)
}

/// `(r·s·e^(−s) − e^(−s) + 2)·e^(−s(r+1))·ln(1 + P_s·s)` with `r = P_s/P_r`:
/// success probability of the two-relay Alamouti link times the rate.
pub fn df_throughput_objective(p: &PowerConfig, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let r = p.ps / p.pr;
    let e = (-s).exp();
    (r * s * e - e + 2.0) * (-s * (r + 1.0)).exp() * (p.ps * s).ln_1p()
}

pub fn df_throughput(p: &PowerConfig) -> RateResult {
    let cap = df_threshold_cap(p);
    let b = Bracket { lo: cap * 1e-9, hi: cap, tol: 1e-12 };
    let r = maximize_scalar(|s| df_throughput_objective(p, s), b);
    let s = r.argmax[0];
    let mut out = RateResult::new(r.value.max(0.0), "closed-form").with_param("s", s);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out
}

/// Best `k`-layer expected rate. Each layer count is seeded with the
/// optimum of the previous one, so the values are nested.
pub fn df_finite_expected_rate(k: usize, p: &PowerConfig) -> Result<RateResult> {
    if k == 0 || k > MAX_LAYERS {
        return Err(Error::UnsupportedLayers(k));
    }
    let single = df_throughput(p);
    let mut best = single.clone();
    let mut sol = LayeredSolution::single(single.param("s").unwrap(), p.ps, false);
    best.value_nats = layered_expected_rate(p, &sol);
    best.params = vec![("k".into(), 1.0)];
    best.method = "layered-exact";
    best.solution = Some(sol.clone());
    for kk in 2..=k {
        let r = optimize_layered(p, kk, false, &sol, "layered-exact")?;
        sol = r.solution.clone().expect("layered optimizer returns a solution");
        best = r;
    }
    Ok(best)
}
