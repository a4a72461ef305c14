//! Finite-layer broadcast coding through two decode/amplify relays.
//!
//! A relay that sees backward gain `a_r` decodes exactly the layers with
//! `s_i ≤ a_r`, so its state is the decoded prefix `m` (and, when it may
//! amplify, `a_r` itself). For fixed relay states every layer's decoding
//! condition at the destination is linear in the forward gains `(a₁, a₂)`, and
//! the probability that layers `1..i` all decode is an exact half-plane
//! integral. The expected rate is the average of `Σ_i P_i R_i` over the two
//! relays' states: discrete prefixes for decode-forward, plus Gauss–Legendre
//! nodes over `a_r` on the intervals where a relay amplifies.

use std::fmt::Write as _;

use super::halfplane::{prob_halfplanes, HalfPlane};
use super::{fmt_sig, RateResult};
use crate::channel::PowerConfig;
use crate::error::{domain, Error, Result};
use crate::numerics::{gauss_legendre_on, maximize_nd_with, Bracket, NdOptions};

/// Largest supported layer count.
pub const MAX_LAYERS: usize = 3;

/// Gauss–Legendre nodes per amplifying interval.
const AMPLIFY_NODES: usize = 6;

const LOGIT_BOUND: f64 = 25.0;
const INCREMENT_LN: (f64, f64) = (-10.0, 2.5);

/// A `k`-layer superposition code: thresholds and layer powers.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPlan {
    pub s: Vec<f64>,
    pub gamma2: Vec<f64>,
}

impl LayerPlan {
    pub fn new(s: Vec<f64>, gamma2: Vec<f64>, ps: f64) -> Result<Self> {
        let k = s.len();
        if k == 0 || k > MAX_LAYERS {
            return Err(Error::UnsupportedLayers(k));
        }
        if gamma2.len() != k {
            return Err(domain("LayerPlan::new", "thresholds and powers differ in length"));
        }
        if !(s[0] > 0.0) || s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("LayerPlan::new", format!("thresholds must be positive and increasing: {s:?}")));
        }
        if gamma2.iter().any(|&g| !(g >= 0.0)) {
            return Err(domain("LayerPlan::new", "layer powers must be nonnegative"));
        }
        let total: f64 = gamma2.iter().sum();
        if (total - ps).abs() > 1e-9 * ps.max(1.0) {
            return Err(domain("LayerPlan::new", format!("layer powers sum to {total}, expected {ps}")));
        }
        Ok(Self { s, gamma2 })
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// `Σ_{j>i} γ_j²` (0-based `i`).
    pub fn interference(&self, i: usize) -> f64 {
        self.gamma2[i + 1..].iter().sum()
    }

    /// Required SINR of layer `i`: `γ_i² s_i / (1 + Σ_{j>i} γ_j² s_i)`.
    pub fn sinr(&self, i: usize) -> f64 {
        self.gamma2[i] * self.s[i] / (1.0 + self.interference(i) * self.s[i])
    }

    pub fn rates(&self) -> Vec<f64> {
        (0..self.k()).map(|i| self.sinr(i).ln_1p()).collect()
    }
}

/// Transmit strategy of a relay that decoded the first `prefix` layers. The
/// same table is used by both relays, since neither knows the other's prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayAllocation {
    pub prefix: usize,
    /// Share of the decoded-layer power given to each decoded layer.
    pub fractions: Vec<f64>,
    /// Fraction of `P_r` spent on decoded layers when the relay also
    /// amplifies; the rest scales the amplified residual.
    pub xi: f64,
}

impl RelayAllocation {
    /// Per-layer powers `α_i²` when the relay does not amplify.
    pub fn powers(&self, pr: f64) -> Vec<f64> {
        self.fractions.iter().map(|f| f * pr).collect()
    }
}

/// A layer plan with its per-prefix relay allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredSolution {
    pub plan: LayerPlan,
    /// Indexed by prefix `0..=k`.
    pub alloc: Vec<RelayAllocation>,
    /// Relays that fail to decode everything amplify the residual when their
    /// backward gain exceeds `P_r/P_s`.
    pub amplify: bool,
}

impl LayeredSolution {
    /// `key=value` pairs joined by `;`.
    pub fn compact(&self) -> String {
        let mut out = String::new();
        let k = self.plan.k();
        for i in 0..k {
            let _ = write!(out, "s{}={};", i + 1, fmt_sig(self.plan.s[i]));
        }
        for i in 0..k {
            let _ = write!(out, "g{}={};", i + 1, fmt_sig(self.plan.gamma2[i]));
        }
        for a in self.alloc.iter().filter(|a| a.prefix >= 2) {
            let fr: Vec<String> = a.fractions.iter().map(|&f| fmt_sig(f)).collect();
            let _ = write!(out, "alloc{}={};", a.prefix, fr.join("/"));
        }
        if self.amplify {
            for a in self.alloc.iter().filter(|a| a.prefix >= 1 && a.prefix < k) {
                let _ = write!(out, "xi{}={};", a.prefix, fmt_sig(a.xi));
            }
        }
        out.pop();
        out
    }

    /// Single-layer solution at threshold `s`.
    pub fn single(s: f64, ps: f64, amplify: bool) -> Self {
        Self {
            plan: LayerPlan { s: vec![s], gamma2: vec![ps] },
            alloc: vec![
                RelayAllocation { prefix: 0, fractions: vec![], xi: 0.0 },
                RelayAllocation { prefix: 1, fractions: vec![1.0], xi: 1.0 },
            ],
            amplify,
        }
    }
}

/// One relay's contribution at the destination, per unit forward gain.
#[derive(Debug, Clone, Copy)]
struct RelayState {
    weight: f64,
    power: [f64; MAX_LAYERS],
    noise: f64,
}

fn relay_states(p: &PowerConfig, sol: &LayeredSolution) -> Vec<RelayState> {
    let plan = &sol.plan;
    let k = plan.k();
    let gate = p.pr / p.ps;
    let mut states = Vec::new();
    for m in 0..=k {
        let lo = if m == 0 { 0.0 } else { plan.s[m - 1] };
        let hi = if m == k { f64::INFINITY } else { plan.s[m] };
        let a = &sol.alloc[m];
        let mut decoded = [0.0; MAX_LAYERS];
        for (i, f) in a.fractions.iter().enumerate() {
            decoded[i] = f * p.pr;
        }
        let amplifying = sol.amplify && m < k && gate < hi;
        let off_hi = if amplifying { gate.max(lo) } else { hi };
        let w = (-lo).exp() - (-off_hi).exp();
        if w > 0.0 {
            states.push(RelayState { weight: w, power: decoded, noise: 0.0 });
        }
        if amplifying {
            let residual: f64 = plan.gamma2[m..].iter().sum();
            for (ar, wn) in gauss_legendre_on(AMPLIFY_NODES, gate.max(lo), hi) {
                let c2 = (1.0 - a.xi) * p.pr / (ar * residual + 1.0);
                let mut power = [0.0; MAX_LAYERS];
                for i in 0..k {
                    power[i] = if i < m { decoded[i] * a.xi } else { ar * c2 * plan.gamma2[i] };
                }
                states.push(RelayState { weight: wn * (-ar).exp(), power, noise: c2 });
            }
        }
    }
    states
}

/// Expected decoded rate `Σ_i Pr{layers 1..i decode}·R_i`, exact up to the
/// Gauss–Legendre rule over amplifying relays.
pub fn layered_expected_rate(p: &PowerConfig, sol: &LayeredSolution) -> f64 {
    let plan = &sol.plan;
    let k = plan.k();
    let tau: Vec<f64> = (0..k).map(|i| plan.sinr(i)).collect();
    let rates: Vec<f64> = tau.iter().map(|t| t.ln_1p()).collect();
    let states = relay_states(p, sol);

    let coef = |st: &RelayState, i: usize| {
        let above: f64 = st.power[i + 1..k].iter().sum::<f64>() + st.noise;
        st.power[i] - tau[i] * above
    };
    let mut total = 0.0;
    let mut lines = Vec::with_capacity(k);
    for (ia, sa) in states.iter().enumerate() {
        for sb in &states[ia..] {
            let mult = if std::ptr::eq(sa, sb) { 1.0 } else { 2.0 };
            lines.clear();
            let mut acc = 0.0;
            for i in 0..k {
                lines.push(HalfPlane::new(coef(sa, i), coef(sb, i), tau[i]));
                let pi = prob_halfplanes(&lines);
                if pi <= 0.0 {
                    break;
                }
                acc += pi * rates[i];
            }
            total += mult * sa.weight * sb.weight * acc;
        }
    }
    total
}

/// Parameter layout of the optimizer.
#[derive(Debug, Clone, Copy)]
struct Layout {
    k: usize,
    amplify: bool,
}

impl Layout {
    fn alloc_len(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    fn len(&self) -> usize {
        let xi = if self.amplify { self.k - 1 } else { 0 };
        self.k + (self.k - 1) + self.alloc_len() + xi
    }

    fn bounds(&self) -> Vec<Bracket> {
        let mut b = Vec::with_capacity(self.len());
        for _ in 0..self.k {
            b.push(Bracket { lo: INCREMENT_LN.0, hi: INCREMENT_LN.1, tol: 1e-9 });
        }
        for _ in 0..(self.k - 1) + self.alloc_len() {
            b.push(Bracket { lo: -LOGIT_BOUND, hi: LOGIT_BOUND, tol: 1e-9 });
        }
        if self.amplify {
            for _ in 1..self.k {
                b.push(Bracket { lo: 0.0, hi: 1.0, tol: 1e-9 });
            }
        }
        b
    }

    fn decode(&self, x: &[f64], ps: f64) -> LayeredSolution {
        let k = self.k;
        let mut s = Vec::with_capacity(k);
        let mut acc = 0.0;
        for &t in &x[..k] {
            acc += t.exp();
            s.push(acc);
        }
        let mut logits = vec![0.0];
        logits.extend_from_slice(&x[k..2 * k - 1]);
        let gamma2: Vec<f64> = softmax(&logits).into_iter().map(|w| w * ps).collect();

        let mut pos = 2 * k - 1;
        let mut alloc = vec![RelayAllocation { prefix: 0, fractions: vec![], xi: 0.0 }];
        for m in 1..=k {
            let mut l = vec![0.0];
            l.extend_from_slice(&x[pos..pos + m - 1]);
            pos += m - 1;
            alloc.push(RelayAllocation { prefix: m, fractions: softmax(&l), xi: 1.0 });
        }
        if self.amplify {
            for a in alloc.iter_mut().take(k).skip(1) {
                a.xi = x[pos];
                pos += 1;
            }
        }
        LayeredSolution { plan: LayerPlan { s, gamma2 }, alloc, amplify: self.amplify }
    }

    /// Parameters reproducing `sol`, which may have `k` or `k − 1` layers; a
    /// shorter solution is embedded with a powerless top layer.
    fn encode(&self, sol: &LayeredSolution) -> Vec<f64> {
        let k = self.k;
        let kin = sol.plan.k();
        let ln_clamp = |v: f64| v.max(1e-300).ln().clamp(-LOGIT_BOUND, LOGIT_BOUND);
        let mut x = Vec::with_capacity(self.len());
        let mut prev = 0.0;
        for i in 0..k {
            if i < kin {
                x.push((sol.plan.s[i] - prev).ln().clamp(INCREMENT_LN.0, INCREMENT_LN.1));
                prev = sol.plan.s[i];
            } else {
                x.push((0.5f64).ln());
            }
        }
        let g1 = sol.plan.gamma2[0];
        for i in 1..k {
            x.push(if i < kin { ln_clamp(sol.plan.gamma2[i] / g1) } else { -LOGIT_BOUND });
        }
        for m in 2..=k {
            let src = &sol.alloc[m.min(kin)].fractions;
            for i in 1..m {
                x.push(if i < src.len() { ln_clamp(src[i] / src[0]) } else { -LOGIT_BOUND });
            }
        }
        if self.amplify {
            for m in 1..k {
                x.push(if m < kin { sol.alloc[m].xi } else { 1.0 });
            }
        }
        x
    }
}

fn softmax(l: &[f64]) -> Vec<f64> {
    let mx = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = l.iter().map(|v| (v - mx).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Maximizes the `k`-layer expected rate starting from `seed` (a `k` or
/// `k − 1` layer solution). `k = 1` is handled by the callers' scalar search.
pub(crate) fn optimize_layered(
    p: &PowerConfig,
    k: usize,
    amplify: bool,
    seed: &LayeredSolution,
    method: &'static str,
) -> Result<RateResult> {
    if k == 0 || k > MAX_LAYERS {
        return Err(Error::UnsupportedLayers(k));
    }
    let layout = Layout { k, amplify };
    let x0 = layout.encode(seed);
    let bounds = layout.bounds();
    let opts = NdOptions { starts: 4, max_evals: 400 * layout.len(), ..NdOptions::default() };
    let r = maximize_nd_with(|x| layered_expected_rate(p, &layout.decode(x, p.ps)), &x0, &bounds, &opts);
    if !r.value.is_finite() {
        return Err(domain("optimize_layered", "objective is not finite at any start"));
    }
    let sol = layout.decode(&r.argmax, p.ps);
    let mut out = RateResult::new(r.value.max(0.0), method).with_param("k", k as f64);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.solution = Some(sol);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn df_closed_form(p: &PowerConfig, s: f64) -> f64 {
        let r = p.ps / p.pr;
        (r * s * (-s).exp() - (-s).exp() + 2.0) * (-s * (r + 1.0)).exp() * (p.ps * s).ln_1p()
    }

    #[test]
    fn single_layer_df_matches_closed_form() {
        for (ps, pr) in [(1.0, 1.0), (1.0, 10.0), (4.0, 1.0), (0.5, 3.0)] {
            let p = PowerConfig::new(ps, pr).unwrap();
            for s in [0.05, 0.3, 0.9, 1.2] {
                let v = layered_expected_rate(&p, &LayeredSolution::single(s, ps, false));
                let want = df_closed_form(&p, s);
                assert!((v - want).abs() < 1e-12, "({ps},{pr}) s={s}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn single_layer_daf_equals_df_when_gate_is_high() {
        // Relays below threshold only amplify above P_r/P_s, which is beyond s here.
        let p = PowerConfig::new(1.0, 10.0).unwrap();
        for s in [0.2, 0.8] {
            let a = layered_expected_rate(&p, &LayeredSolution::single(s, 1.0, true));
            let b = layered_expected_rate(&p, &LayeredSolution::single(s, 1.0, false));
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn embedding_preserves_value() {
        let p = PowerConfig::new(1.0, 10.0).unwrap();
        let one = LayeredSolution::single(0.6, 1.0, false);
        let layout = Layout { k: 2, amplify: false };
        let x = layout.encode(&one);
        let two = layout.decode(&x, 1.0);
        let (a, b) = (layered_expected_rate(&p, &one), layered_expected_rate(&p, &two));
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        let back = layout.encode(&two);
        for (u, v) in x.iter().zip(&back) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn plan_validation_and_rates() {
        assert!(LayerPlan::new(vec![0.5, 0.4], vec![0.5, 0.5], 1.0).is_err());
        assert!(LayerPlan::new(vec![0.5, 0.9], vec![0.5, 0.4], 1.0).is_err());
        assert!(matches!(LayerPlan::new(vec![0.1, 0.2, 0.3, 0.4], vec![0.25; 4], 1.0), Err(Error::UnsupportedLayers(4))));
        let plan = LayerPlan::new(vec![0.5, 1.5], vec![0.6, 0.4], 1.0).unwrap();
        let r = plan.rates();
        assert!((r[0] - (1.0 + 0.3 / 1.2f64).ln()).abs() < 1e-15);
        assert!((r[1] - (1.0 + 0.6f64).ln()).abs() < 1e-15);
    }
}
