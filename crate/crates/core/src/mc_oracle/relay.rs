//! Decode-forward, amplify-forward and hybrid relaying, run one realization
//! at a time.
//!
//! Every relay first decodes source layers in order from its own observation,
//! then transmits its decoded layers with the allocation for its prefix and,
//! if allowed and its backward gain clears the gate, an amplified copy of the
//! undecoded residual. The destination combines the two relays through the
//! Alamouti matrices and decodes layers in order.

use num_complex::Complex64;

use super::alamouti::{alamouti_snr, amplify_branch, AlamoutiBranch};
use super::{run, Outcome, SimReport};
use crate::channel::{FadingSample, PowerConfig, SeedSpec};
use crate::schemes::{LayerPlan, RelayAllocation, MAX_LAYERS};

/// Which relays decode in the single-layer hybrid protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DafCase {
    /// As the backward gains dictate.
    Natural,
    /// Both relays treated as having decoded.
    BothDecode,
    /// Neither relay treated as having decoded.
    NoneDecode,
}

const RELAY_BRANCHES: [&str; 3] = ["none", "one", "both"];
const DECODED_BRANCHES: [&str; MAX_LAYERS + 1] = ["decoded-0", "decoded-1", "decoded-2", "decoded-3"];

struct Protocol<'a> {
    plan: &'a LayerPlan,
    alloc: &'a [RelayAllocation],
    /// Share of `P_r` kept for decoded layers, per prefix, for each relay.
    xi: [&'a [f64]; 2],
    tau: Vec<f64>,
    rates: Vec<f64>,
    pr: f64,
}

impl<'a> Protocol<'a> {
    fn new(p: &PowerConfig, plan: &'a LayerPlan, alloc: &'a [RelayAllocation], xi: [&'a [f64]; 2]) -> Self {
        assert_eq!(alloc.len(), plan.k() + 1, "one allocation per prefix 0..=k");
        let k = plan.k();
        let tau: Vec<f64> = (0..k).map(|i| plan.sinr(i)).collect();
        let rates = tau.iter().map(|t| t.ln_1p()).collect();
        Self { plan, alloc, xi, tau, rates, pr: p.pr }
    }

    fn k(&self) -> usize {
        self.plan.k()
    }

    /// Layers the relay decodes from `y = h_r·Σγ_i x_i + z`.
    fn relay_prefix(&self, ar: f64) -> usize {
        let mut m = 0;
        while m < self.k() {
            let sinr = ar * self.plan.gamma2[m] / (1.0 + ar * self.plan.interference(m));
            if sinr < self.tau[m] {
                break;
            }
            m += 1;
        }
        m
    }

    fn branch(&self, relay: usize, h: Complex64, hr: Complex64, ar: f64, m: usize, amplify: bool) -> AlamoutiBranch {
        let k = self.k();
        let xi = if amplify { self.xi[relay][m] } else { 1.0 };
        let mut out = if amplify {
            let residual: Vec<f64> = (0..k).map(|i| if i < m { 0.0 } else { self.plan.gamma2[i] }).collect();
            amplify_branch(h, hr, ar, (1.0 - xi) * self.pr, &residual)
        } else {
            AlamoutiBranch::SILENT
        };
        for (i, f) in self.alloc[m].fractions.iter().enumerate().take(m) {
            out.layers[i] = h * (xi * f * self.pr).sqrt();
        }
        out
    }

    /// Decoded rate and layer count at the destination.
    fn destination(&self, r1: &AlamoutiBranch, r2: &AlamoutiBranch) -> (f64, usize) {
        let k = self.k();
        let mut rate = 0.0;
        for i in 0..k {
            if alamouti_snr(r1, r2, k, i) < self.tau[i] {
                return (rate, i);
            }
            rate += self.rates[i];
        }
        (rate, k)
    }

    /// Runs one realization with the relays' prefixes and amplify decisions.
    fn transmit(&self, x: &FadingSample, m: [usize; 2], amp: [bool; 2]) -> (f64, usize) {
        let r1 = self.branch(0, x.h1, x.hr1, x.ar1, m[0], amp[0]);
        let r2 = self.branch(1, x.h2, x.hr2, x.ar2, m[1], amp[1]);
        self.destination(&r1, &r2)
    }
}

fn single(p: &PowerConfig, s: f64) -> (LayerPlan, Vec<RelayAllocation>) {
    let plan = LayerPlan { s: vec![s], gamma2: vec![p.ps] };
    let alloc = vec![
        RelayAllocation { prefix: 0, fractions: vec![], xi: 0.0 },
        RelayAllocation { prefix: 1, fractions: vec![1.0], xi: 1.0 },
    ];
    (plan, alloc)
}

const NO_XI: [f64; MAX_LAYERS + 1] = [0.0; MAX_LAYERS + 1];

/// Single-layer decode-forward at threshold `s`. Counters: how many relays
/// decoded; extras: each branch's contribution to the estimate.
pub fn simulate_df_single(p: &PowerConfig, s: f64, n: usize, seed: SeedSpec) -> SimReport {
    let (plan, alloc) = single(p, s);
    let proto = Protocol::new(p, &plan, &alloc, [&NO_XI, &NO_XI]);
    run(seed, n, &RELAY_BRANCHES, |x| {
        let m = [proto.relay_prefix(x.ar1), proto.relay_prefix(x.ar2)];
        let (value, _) = proto.transmit(x, m, [false, false]);
        Outcome { value, branch: m[0] + m[1], side: [0.0; 2] }
    })
    .0
}

/// Single-layer amplify-forward: relay `ℓ` is ON iff `a_rℓ ≥ gate`.
/// Counters: how many relays were ON.
pub fn simulate_af_single(p: &PowerConfig, s: f64, gate: f64, n: usize, seed: SeedSpec) -> SimReport {
    let (plan, alloc) = single(p, s);
    let proto = Protocol::new(p, &plan, &alloc, [&NO_XI, &NO_XI]);
    run(seed, n, &RELAY_BRANCHES, |x| {
        let on = [x.ar1 >= gate, x.ar2 >= gate];
        let (value, _) = proto.transmit(x, [0, 0], on);
        Outcome { value, branch: usize::from(on[0]) + usize::from(on[1]), side: [0.0; 2] }
    })
    .0
}

/// Single-layer hybrid relaying at threshold `s`.
///
/// A relay that decoded forwards with full power. One that did not amplifies
/// iff its backward gain exceeds `P_r/P_s` (the forward gain of the decoding
/// relay replaced by its mean). Extra `genie` is the estimate when the
/// non-decoding relay instead amplifies iff `a_r > (P_r/P_s)·a_d`, with `a_d`
/// the realized forward gain of the decoding relay.
pub fn simulate_daf_single(p: &PowerConfig, s: f64, case: DafCase, n: usize, seed: SeedSpec) -> SimReport {
    let (plan, alloc) = single(p, s);
    let proto = Protocol::new(p, &plan, &alloc, [&NO_XI, &NO_XI]);
    let g = p.pr / p.ps;
    let (mut report, side) = run(seed, n, &RELAY_BRANCHES, |x| {
        let m = match case {
            DafCase::Natural => [proto.relay_prefix(x.ar1), proto.relay_prefix(x.ar2)],
            DafCase::BothDecode => [1, 1],
            DafCase::NoneDecode => [0, 0],
        };
        let ar = [x.ar1, x.ar2];
        let amp = [m[0] == 0 && ar[0] > g, m[1] == 0 && ar[1] > g];
        let (value, _) = proto.transmit(x, m, amp);
        let genie = if m[0] + m[1] == 1 {
            let (d, a) = if m[0] == 1 { (x.a1, 1) } else { (x.a2, 0) };
            let mut amp_genie = [false; 2];
            amp_genie[a] = ar[a] > g * d;
            proto.transmit(x, m, amp_genie).0
        } else {
            value
        };
        Outcome { value, branch: m[0] + m[1], side: [genie, 0.0] }
    });
    report.extras.push(("genie", side[0]));
    report
}

/// Finite-layer decode-forward with per-prefix allocations `alloc[0..=k]`.
/// Counters: layers decoded at the destination.
pub fn simulate_layered_df(
    p: &PowerConfig,
    plan: &LayerPlan,
    alloc: &[RelayAllocation],
    n: usize,
    seed: SeedSpec,
) -> SimReport {
    let proto = Protocol::new(p, plan, alloc, [&NO_XI, &NO_XI]);
    run(seed, n, &DECODED_BRANCHES[..=plan.k()], |x| {
        let m = [proto.relay_prefix(x.ar1), proto.relay_prefix(x.ar2)];
        let (value, layers) = proto.transmit(x, m, [false, false]);
        Outcome { value, branch: layers, side: [0.0; 2] }
    })
    .0
}

/// Finite-layer hybrid relaying. A relay with prefix `m < k` whose backward
/// gain exceeds `P_r/P_s` keeps the fraction `xi[m]` (relay 1) or `zeta[m]`
/// (relay 2) of its power for the decoded layers and amplifies the
/// interference-cancelled residual with the rest; otherwise it forwards the
/// decoded layers with full power.
pub fn simulate_layered_daf(
    p: &PowerConfig,
    plan: &LayerPlan,
    alloc: &[RelayAllocation],
    xi: &[f64],
    zeta: &[f64],
    n: usize,
    seed: SeedSpec,
) -> SimReport {
    assert!(xi.len() > plan.k() - 1 && zeta.len() > plan.k() - 1, "one power split per prefix 0..k");
    let proto = Protocol::new(p, plan, alloc, [xi, zeta]);
    let k = plan.k();
    let g = p.pr / p.ps;
    run(seed, n, &DECODED_BRANCHES[..=k], |x| {
        let m = [proto.relay_prefix(x.ar1), proto.relay_prefix(x.ar2)];
        let amp = [m[0] < k && x.ar1 > g, m[1] < k && x.ar2 > g];
        let (value, layers) = proto.transmit(x, m, amp);
        Outcome { value, branch: layers, side: [0.0; 2] }
    })
    .0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(ps: f64, pr: f64) -> PowerConfig {
        PowerConfig::new(ps, pr).unwrap()
    }

    #[test]
    fn df_single_reference_points() {
        let p = pc(1.0, 1.0);
        let r = simulate_df_single(&p, 1e-9, 20_000, SeedSpec::new(1, 9));
        assert!(r.estimate < 1e-8);
        let r = simulate_df_single(&p, 0.6, 200_000, SeedSpec::new(1, 9));
        let r_s: f64 = 0.6;
        // (2 − e^(−s) + s e^(−s)) e^(−2s) ln(1 + s) at P_s = P_r
        let want = (2.0 - (-r_s).exp() + r_s * (-r_s).exp()) * (-2.0 * r_s).exp() * r_s.ln_1p();
        assert!(r.z_score(want, 0.0).abs() < 4.0, "{} vs {want}", r.estimate);
        assert_eq!(r.counters.iter().map(|c| c.1).sum::<u64>(), 200_000);
    }

    #[test]
    fn forced_cases_isolate_branches() {
        let p = pc(1.0, 10.0);
        let seed = SeedSpec::new(2, 5);
        let both = simulate_daf_single(&p, 0.8, DafCase::BothDecode, 50_000, seed);
        assert!(both.estimate > 0.0);
        assert_eq!(both.counter("both"), Some(50_000));
        let none = simulate_daf_single(&p, 0.8, DafCase::NoneDecode, 50_000, seed);
        let af = simulate_af_single(&p, 0.8, p.pr / p.ps, 50_000, seed);
        assert_eq!(none.estimate, af.estimate);
    }

    #[test]
    fn layered_with_powerless_top_layer_matches_single() {
        let p = pc(1.0, 10.0);
        let seed = SeedSpec::new(4, 1);
        let plan = LayerPlan::new(vec![0.7, 1.5], vec![1.0, 0.0], 1.0).unwrap();
        let alloc = vec![
            RelayAllocation { prefix: 0, fractions: vec![], xi: 0.0 },
            RelayAllocation { prefix: 1, fractions: vec![1.0], xi: 1.0 },
            RelayAllocation { prefix: 2, fractions: vec![1.0, 0.0], xi: 1.0 },
        ];
        let a = simulate_layered_df(&p, &plan, &alloc, 30_000, seed);
        let b = simulate_df_single(&p, 0.7, 30_000, seed);
        assert!((a.estimate - b.estimate).abs() < 1e-12);
    }

    #[test]
    fn layered_daf_without_amplifying_power_is_df() {
        let p = pc(1.0, 10.0);
        let seed = SeedSpec::new(4, 2);
        let plan = LayerPlan::new(vec![0.5, 1.2], vec![0.6, 0.4], 1.0).unwrap();
        let alloc = vec![
            RelayAllocation { prefix: 0, fractions: vec![], xi: 0.0 },
            RelayAllocation { prefix: 1, fractions: vec![1.0], xi: 1.0 },
            RelayAllocation { prefix: 2, fractions: vec![0.7, 0.3], xi: 1.0 },
        ];
        // Only prefix-0 relays would amplify, and with g = 10 they rarely do.
        let big = pc(1.0, 1e6);
        let a = simulate_layered_daf(&big, &plan, &alloc, &[0.0, 1.0], &[0.0, 1.0], 30_000, seed);
        let b = simulate_layered_df(&big, &plan, &alloc, 30_000, seed);
        assert!((a.estimate - b.estimate).abs() < 1e-12);
        let c = simulate_layered_daf(&p, &plan, &alloc, &[0.0, 0.5], &[0.0, 0.5], 30_000, seed);
        assert!(c.estimate > 0.0);
    }
}
