//! Monte Carlo ground truth.
//!
//! Each simulator draws fading realizations and runs the relaying protocol on
//! them: which relays decode, what each transmits, how the destination
//! combines the Alamouti pair, and whether the resulting mutual information
//! covers the layer rate. Decodability follows the capacity-threshold
//! abstraction; noise is never sampled. Nothing here calls the analytic rate
//! expressions of [`crate::schemes`].

mod alamouti;
mod broadcast;
mod cf;
mod relay;

pub use alamouti::{alamouti_af_mutual_info, alamouti_snr, AlamoutiBranch};
pub use broadcast::{discrete_broadcast_rate, DISCRETE_LAYERS};
pub use cf::{cf_conditional_gain, cf_decode_probability_quadrature, simulate_cf};
pub use relay::{
    simulate_af_single, simulate_daf_single, simulate_df_single, simulate_layered_daf, simulate_layered_df, DafCase,
};

use crate::channel::{fold_chunks, FadingSample, SeedSpec};

/// Estimate with its standard error and per-branch counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: SeedSpec,
    /// Realizations per protocol branch; the counts sum to `n`.
    pub counters: Vec<(&'static str, u64)>,
    /// Side estimates (successes per branch, gate variants, factorized forms).
    pub extras: Vec<(&'static str, f64)>,
}

impl SimReport {
    pub fn counter(&self, name: &str) -> Option<u64> {
        self.counters.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    /// `(value − estimate)/std_error`, with `extra_se` added in quadrature.
    pub fn z_score(&self, value: f64, extra_se: f64) -> f64 {
        let se = (self.std_error * self.std_error + extra_se * extra_se).sqrt();
        if se == 0.0 {
            if value == self.estimate {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (value - self.estimate) / se
        }
    }
}

/// What one realization contributed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub value: f64,
    pub branch: usize,
    /// Statistics tracked alongside (a gate variant, component events).
    pub side: [f64; 2],
}

#[derive(Debug, Clone)]
struct Acc {
    sum: f64,
    sum_sq: f64,
    side: [f64; 2],
    counts: Vec<u64>,
    branch_value: Vec<f64>,
}

impl Acc {
    fn new(branches: usize) -> Self {
        Self { sum: 0.0, sum_sq: 0.0, side: [0.0; 2], counts: vec![0; branches], branch_value: vec![0.0; branches] }
    }

    fn merge(&mut self, o: &Acc) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.side[0] += o.side[0];
        self.side[1] += o.side[1];
        for i in 0..self.counts.len() {
            self.counts[i] += o.counts[i];
            self.branch_value[i] += o.branch_value[i];
        }
    }
}

/// Runs `step` over `n` realizations of `seed`. Chunk accumulators are merged
/// in sample order, so results do not depend on the thread count. The
/// standard error comes from the per-sample second moment.
pub(crate) fn run<F>(seed: SeedSpec, n: usize, branches: &[&'static str], step: F) -> (SimReport, [f64; 2])
where
    F: Fn(&FadingSample) -> Outcome + Sync,
{
    let nb = branches.len();
    let parts = fold_chunks(seed, n, |stream, len| {
        let mut acc = Acc::new(nb);
        for _ in 0..len {
            let o = step(&stream.next_sample());
            acc.sum += o.value;
            acc.sum_sq += o.value * o.value;
            acc.side[0] += o.side[0];
            acc.side[1] += o.side[1];
            acc.counts[o.branch] += 1;
            acc.branch_value[o.branch] += o.value;
        }
        acc
    });
    let mut total = Acc::new(nb);
    for p in &parts {
        total.merge(p);
    }
    let nf = n as f64;
    let mean = total.sum / nf;
    let var = if n > 1 { ((total.sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0) } else { 0.0 };
    let extras = branches
        .iter()
        .zip(&total.branch_value)
        .map(|(&b, &v)| (b, v / nf))
        .collect();
    let report = SimReport {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        n,
        seed,
        counters: branches.iter().copied().zip(total.counts.iter().copied()).collect(),
        extras,
    };
    (report, [total.side[0] / nf, total.side[1] / nf])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error_scales_with_sample_size() {
        let seed = SeedSpec::new(3, 77);
        let step = |x: &FadingSample| Outcome { value: f64::from(u8::from(x.a1 + x.a2 > 1.5)), branch: 0, side: [0.0; 2] };
        let se: Vec<f64> = [10_000, 100_000, 1_000_000].iter().map(|&n| run(seed, n, &["all"], step).0.std_error).collect();
        for w in se.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "{se:?}");
        }
    }

    #[test]
    fn counters_sum_to_n() {
        let step = |x: &FadingSample| Outcome { value: x.a1, branch: usize::from(x.a1 > 1.0), side: [0.0; 2] };
        let (r, _) = run(SeedSpec::default(), 70_001, &["low", "high"], step);
        assert_eq!(r.counters.iter().map(|c| c.1).sum::<u64>(), 70_001);
        assert!((r.estimate - 1.0).abs() < 4.0 * r.std_error);
        assert!(r.z_score(r.estimate, 0.0) == 0.0);
    }
}
