//! Compress-and-forward: the full inequality block per realization, and a
//! deterministic quadrature of the index-recovery probability.

use super::{run, Outcome, SimReport};
use crate::channel::{fold_chunks, PowerConfig, SeedSpec};
use crate::error::{Error, Result};
use crate::gains::{GainDistribution, TableSource, GRID_LO, GRID_POINTS};
use crate::numerics::{gauss_legendre_on, integrate, logspace};
use crate::schemes::CfParams;

/// `θ = 1 − D/(1 + a_r P_s)`, or 0 when the quantizer noise swamps the
/// observation.
fn quantizer_scale(d: f64, ar: f64, ps: f64) -> f64 {
    (1.0 - d / (1.0 + ar * ps)).max(0.0)
}

/// Gain of the jointly reconstructed relay observations.
fn combined_gain(ar1: f64, ar2: f64, d: f64, ps: f64) -> f64 {
    let (t1, t2) = (quantizer_scale(d, ar1, ps), quantizer_scale(d, ar2, ps));
    let part = |ar: f64, own: f64, other: f64| {
        if own == 0.0 {
            0.0
        } else {
            ar / (1.0 + (other + d) / (other + 1.0) * d / own)
        }
    };
    part(ar1, t1, t2) + part(ar2, t2, t1)
}

/// Wyner–Ziv side of the block: the relay rate must exceed both
/// `ln(√((a_r1 + a_r2)P_s + 1)/D)` and
/// `ln(1 + a_CF P_s) + ln((θ₁ + D)(θ₂ + D)/(D(1 + min(a_r1, a_r2)P_s)))`.
fn compression_ok(ar1: f64, ar2: f64, c: &CfParams, ps: f64) -> bool {
    let d = c.distortion;
    let r = c.relay_rate;
    let (t1, t2) = (quantizer_scale(d, ar1, ps), quantizer_scale(d, ar2, ps));
    let joint = (((ar1 + ar2) * ps + 1.0).sqrt() / d).ln();
    let a_cf = combined_gain(ar1, ar2, d, ps);
    let cond = (1.0 + a_cf * ps).ln() + ((t1 + d) * (t2 + d) / (d * (1.0 + ar1.min(ar2) * ps))).ln();
    r > 0.0 && joint < r && cond < r
}

/// MAC side: `R_r < min(ln√((a₁ + a₂)P_r + 1), ln(1 + min(a₁, a₂)P_r))`.
fn forwarding_ok(a1: f64, a2: f64, r: f64, pr: f64) -> bool {
    r < ((a1 + a2) * pr + 1.0).sqrt().ln() && r < (1.0 + a1.min(a2) * pr).ln()
}

/// Single-layer CF at source threshold `s`. Extras: `decode_probability`
/// (both index sets recovered), `source_probability` (`a_CF ≥ s`) and their
/// `product`, for comparing the joint event with a factorized one.
pub fn simulate_cf(p: &PowerConfig, c: &CfParams, s: f64, n: usize, seed: SeedSpec) -> SimReport {
    let rate = (p.ps * s).ln_1p();
    let (mut report, side) = run(seed, n, &["lost", "recovered"], |x| {
        let recovered = compression_ok(x.ar1, x.ar2, c, p.ps) && forwarding_ok(x.a1, x.a2, c.relay_rate, p.pr);
        let layer = combined_gain(x.ar1, x.ar2, c.distortion, p.ps) >= s;
        let value = if recovered && layer { rate } else { 0.0 };
        Outcome { value, branch: usize::from(recovered), side: [f64::from(u8::from(recovered)), f64::from(u8::from(layer))] }
    });
    report.extras.push(("decode_probability", side[0]));
    report.extras.push(("source_probability", side[1]));
    report.extras.push(("product", side[0] * side[1]));
    report
}

/// Distribution of `a_CF` given that the quantization indices fit the relay
/// rate (`L < R_r`); the forward hop is independent of it.
pub fn cf_conditional_gain(p: &PowerConfig, c: &CfParams, n: usize, seed: SeedSpec) -> Result<GainDistribution> {
    let mut gains: Vec<f64> = fold_chunks(seed, n, |stream, len| {
        (0..len)
            .map(|_| stream.next_sample())
            .filter(|x| compression_ok(x.ar1, x.ar2, c, p.ps))
            .map(|x| combined_gain(x.ar1, x.ar2, c.distortion, p.ps))
            .collect::<Vec<_>>()
    })
    .concat();
    if gains.len() < 1000 {
        return Err(Error::InsufficientSamples { got: gains.len(), needed: 1000 });
    }
    gains.sort_by(f64::total_cmp);
    let hi = gains[gains.len() - 1].max(GRID_LO * 10.0);
    let grid = logspace(GRID_LO, hi, GRID_POINTS);
    let m = gains.len() as f64;
    let cdf: Vec<f64> = grid.iter().map(|&g| gains.partition_point(|&a| a <= g) as f64 / m).collect();
    GainDistribution::from_cdf_values(grid, &cdf, TableSource::MonteCarlo)
}

const OUTER_CELLS: usize = 64;
const OUTER_NODES: usize = 8;
const SCAN: usize = 1024;

/// `Pr{L < R_r < U}` by quadrature over the four exponential gains.
///
/// The backward pair enters only through `L`, the forward pair only through
/// `U`, so the probability is the product of two 2-D integrals. The backward
/// one is taken in `t = 1 − e^(−a_r)` coordinates: the inner set of admissible
/// `t₂` is located by a scan and refined by bisection at every sign change.
/// The forward one reduces by symmetry to a 1-D integral.
pub fn cf_decode_probability_quadrature(p: &PowerConfig, c: &CfParams) -> f64 {
    if c.relay_rate <= 0.0 {
        return 0.0;
    }
    let to_gain = |t: f64| -(-t).ln_1p();
    let ok = |ar1: f64, t2: f64| compression_ok(ar1, to_gain(t2), c, p.ps);
    let t_top = 1.0 - 1e-12;
    let inner = |ar1: f64| -> f64 {
        let pts: Vec<f64> = (0..=SCAN).map(|j| (j as f64 / SCAN as f64).min(t_top)).collect();
        let flags: Vec<bool> = pts.iter().map(|&t| ok(ar1, t)).collect();
        // Measure of {t₂ : ok}, with edges located by bisection.
        let mut edges = vec![(pts[0], flags[0])];
        for j in 1..pts.len() {
            if flags[j] != flags[j - 1] {
                let (mut lo, mut hi) = (pts[j - 1], pts[j]);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if ok(ar1, mid) == flags[j - 1] {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                edges.push((0.5 * (lo + hi), flags[j]));
            }
        }
        edges.push((1.0, false));
        edges.windows(2).filter(|w| w[0].1).map(|w| w[1].0 - w[0].0).sum()
    };
    let mut backward = 0.0;
    for cell in 0..OUTER_CELLS {
        let (lo, hi) = (cell as f64 / OUTER_CELLS as f64, (cell + 1) as f64 / OUTER_CELLS as f64);
        for (t1, w) in gauss_legendre_on(OUTER_NODES, lo, hi) {
            backward += w * inner(to_gain(t1));
        }
    }

    // Forward: Pr{min(a₁, a₂) ≥ u, a₁ + a₂ ≥ v} = 2∫_u^∞ e^(−x) e^(−max(x, v − x)) dx.
    let r = c.relay_rate;
    let u = r.exp_m1() / p.pr;
    let v = (2.0 * r).exp_m1() / p.pr;
    let f = |x: f64| 2.0 * (-x - x.max(v - x)).exp();
    let split = (0.5 * v).max(u);
    let tail = (-2.0 * split).exp(); // 2∫_split^∞ e^(−2x) dx
    let head = if split > u { integrate(f, u, split, 1e-13).unwrap_or(f64::NAN) } else { 0.0 };
    backward * (head + tail)
}
