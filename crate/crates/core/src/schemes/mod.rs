//! Rate engines for the four relaying schemes.
//!
//! Single-layer engines return the maximum throughput (success probability ×
//! rate). Finite-layer engines (DF, DAF; up to three layers) evaluate the
//! expected decoded rate exactly by integrating over the half-planes that
//! successive decoding carves out of the second-hop gains. Continuous-layer
//! engines (AF, CF) go through [`continuous_expected_rate`].

mod af;
mod cf;
mod continuous;
mod daf;
mod df;
pub mod halfplane;
mod layered;

pub use af::{af_expected_rate, af_expected_rate_with, af_mixture, af_tables, af_throughput, af_throughput_with, AfTables};
pub use cf::{
    cf_decode_probability, cf_expected_rate, cf_expected_rate_with, cf_throughput, cf_throughput_with, mac_probability,
    CfParams, CfSamples,
};
pub use continuous::{continuous_expected_rate, S0Equation};
pub use daf::{
    daf_finite_expected_rate, daf_finite_expected_rate_with, daf_throughput, daf_throughput_closed_form,
    daf_throughput_closed_form_with, DafOptions,
};
pub use df::{df_finite_expected_rate, df_throughput, df_throughput_objective, df_threshold_cap};
pub use layered::{layered_expected_rate, LayerPlan, LayeredSolution, RelayAllocation, MAX_LAYERS};

use crate::channel::SeedSpec;
use crate::gains::TableCache;

/// A computed rate with the parameters that achieve it.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub value_nats: f64,
    /// Named argmax values in a fixed order.
    pub params: Vec<(String, f64)>,
    pub evaluations: usize,
    pub converged: bool,
    pub method: &'static str,
    /// Layer plan and relay allocations of finite-layer engines.
    pub solution: Option<LayeredSolution>,
}

impl RateResult {
    pub(crate) fn new(value_nats: f64, method: &'static str) -> Self {
        Self { value_nats, params: Vec::new(), evaluations: 0, converged: true, method, solution: None }
    }

    pub(crate) fn with_param(mut self, key: &str, v: f64) -> Self {
        self.params.push((key.to_string(), v));
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    /// `key=value` pairs joined by `;`, six significant digits.
    pub fn params_string(&self) -> String {
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={}", fmt_sig(*v))).collect();
        if let Some(sol) = &self.solution {
            parts.push(sol.compact());
        }
        parts.join(";")
    }
}

pub(crate) fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

/// Stream indices of the Monte Carlo tables, so that distinct tables and the
/// oracle never share random numbers.
pub mod streams {
    pub const AF2: u64 = 1;
    pub const DAF: u64 = 2;
    pub const CF: u64 = 3;
    /// First stream reserved for oracle runs.
    pub const ORACLE: u64 = 1000;
}

/// Monte Carlo settings shared by the table-backed engines.
#[derive(Debug, Clone)]
pub struct McSettings {
    pub n: usize,
    pub master_seed: u64,
    pub cache: Option<TableCache>,
}

impl McSettings {
    pub const DEFAULT_N: usize = 2_000_000;

    pub fn new(n: usize, master_seed: u64) -> Self {
        Self { n, master_seed, cache: None }
    }

    pub fn with_cache(mut self, cache: TableCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn seed(&self, stream: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, stream)
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self::new(Self::DEFAULT_N, crate::channel::DEFAULT_SEED)
    }
}
