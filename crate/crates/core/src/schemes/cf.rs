//! Compress-and-forward with Wyner–Ziv quantization at both relays.
//!
//! Both relays quantize with distortion `D` and send the indices at rate
//! `R_r` over the Alamouti second hop. The destination recovers them when
//! `L < R_r < U`, where `L` (the larger of the two Wyner–Ziv rate
//! requirements) depends only on the backward gains and `U` (the MAC limits)
//! only on the forward gains. Given recovery, the source layer(s) see the
//! scalar gain `a_CF`.
//!
//! The forward-hop probability is closed form:
//! `Pr{U > R} = e^(−2u)(1 + w)e^(−w)`, `u = (e^R − 1)/P_r`, `w = (e^R − 1)²/P_r`.
//! The backward-gain part is counted from one fixed sample of `(a_r1, a_r2)`
//! shared by every candidate `(D, R_r)`, so the search sees a smooth surface.

use rayon::prelude::*;

use super::continuous::{continuous_expected_rate, S0Equation};
use super::{streams, McSettings, RateResult};
use crate::channel::{fold_chunks, PowerConfig, SeedSpec};
use crate::error::{domain, Error, Result};
use crate::gains::{gain_cf_clamped, theta, GainDistribution, TableSource, GRID_LO, GRID_POINTS, MIN_MC_SAMPLES};
use crate::numerics::{logspace, maximize_scalar_with, Bracket};

/// 90% quantile of a unit-mean exponential.
const Q90: f64 = std::f64::consts::LN_10;
const D_MIN: f64 = 1e-3;
const R_MIN: f64 = 0.05;
/// Candidate relay rates per distortion.
const R_POINTS: usize = 96;
/// Scan points of the outer distortion search.
const D_SCAN: usize = 20;
/// `a_CF ≤ a_r1 + a_r2`, whose upper 10⁻⁵ tail starts below this.
const GAIN_HI: f64 = 14.0;
/// Smallest conditional sample used for a continuous-layer table.
const MIN_CONDITIONAL: usize = 10_000;

/// Quantizer distortion and relay rate (nats), shared by both relays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfParams {
    pub distortion: f64,
    pub relay_rate: f64,
}

impl CfParams {
    pub fn new(distortion: f64, relay_rate: f64) -> Result<Self> {
        if !(distortion > 0.0 && distortion.is_finite()) {
            return Err(domain("CfParams::new", format!("distortion {distortion} must be finite and > 0")));
        }
        if !(relay_rate >= 0.0 && relay_rate.is_finite()) {
            return Err(domain("CfParams::new", format!("relay rate {relay_rate} must be finite and ≥ 0")));
        }
        Ok(Self { distortion, relay_rate })
    }
}

/// `(a_CF, L)`: the combined gain and the relay rate the quantized pair
/// needs, never below zero.
#[inline]
pub(crate) fn wyner_ziv(ar1: f64, ar2: f64, d: f64, ps: f64) -> (f64, f64) {
    let a_cf = gain_cf_clamped(ar1, ar2, d, ps);
    let t1 = theta(d, ar1, ps).max(0.0);
    let t2 = theta(d, ar2, ps).max(0.0);
    let joint = 0.5 * ((ar1 + ar2) * ps).ln_1p() - d.ln();
    let side = (a_cf * ps).ln_1p() + ((t1 + d) * (t2 + d) / (d * (1.0 + ar1.min(ar2) * ps))).ln();
    (a_cf, joint.max(side).max(0.0))
}

/// `Pr{R < min(½ln(1 + (a₁+a₂)P_r), ln(1 + min(a₁,a₂)P_r))}`.
pub fn mac_probability(pr: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    let e = r.exp_m1();
    let u = e / pr;
    let w = e * e / pr;
    (-2.0 * u - w).exp() * (1.0 + w)
}

/// Monte Carlo estimate of `Pr{L < R_r < U}` over full fading realizations.
pub fn cf_decode_probability(p: &PowerConfig, c: &CfParams, n: usize, seed: SeedSpec) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let (d, r) = (c.distortion, c.relay_rate);
    let hits: u64 = fold_chunks(seed, n, |stream, len| {
        let mut h = 0u64;
        for _ in 0..len {
            let x = stream.next_sample();
            let (_, lo) = wyner_ziv(x.ar1, x.ar2, d, p.ps);
            let hi = (0.5 * ((x.a1 + x.a2) * p.pr).ln_1p()).min((x.a1.min(x.a2) * p.pr).ln_1p());
            h += u64::from(lo < r && r < hi);
        }
        h
    })
    .into_iter()
    .sum();
    hits as f64 / n as f64
}

/// Backward-gain sample shared by all candidate parameters.
#[derive(Debug, Clone)]
pub struct CfSamples {
    p: PowerConfig,
    ar: Vec<(f64, f64)>,
    r_grid: Vec<f64>,
    gain_grid: Vec<f64>,
}

/// Counts for one distortion: `le[r][g] = #{L < R_r, a_CF ≤ g_j}` and
/// `total[r] = #{L < R_r}`.
struct CfCounts {
    le: Vec<Vec<u32>>,
    total: Vec<u32>,
}

impl CfSamples {
    pub fn draw(p: &PowerConfig, n: usize, seed: SeedSpec) -> Result<Self> {
        if n < MIN_MC_SAMPLES {
            return Err(Error::InsufficientSamples { got: n, needed: MIN_MC_SAMPLES });
        }
        let ar = fold_chunks(seed, n, |stream, len| {
            (0..len).map(|_| stream.next_sample()).map(|x| (x.ar1, x.ar2)).collect::<Vec<_>>()
        })
        .concat();
        let r_max = (p.pr * Q90).ln_1p().max(R_MIN * 2.0);
        let r_grid = (0..R_POINTS).map(|i| R_MIN + (r_max - R_MIN) * i as f64 / (R_POINTS - 1) as f64).collect();
        Ok(Self { p: *p, ar, r_grid, gain_grid: logspace(GRID_LO, GAIN_HI, GRID_POINTS) })
    }

    pub fn len(&self) -> usize {
        self.ar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ar.is_empty()
    }

    /// Candidate relay rates.
    pub fn relay_rates(&self) -> &[f64] {
        &self.r_grid
    }

    /// Distortion search interval `[10⁻³, 1 + P_s·q90(a_r)]`.
    pub fn distortion_bracket(&self) -> Bracket {
        Bracket { lo: D_MIN.ln(), hi: (1.0 + self.p.ps * Q90).ln(), tol: 2e-3 }
    }

    fn counts(&self, d: f64) -> CfCounts {
        let nr = self.r_grid.len();
        let m = self.gain_grid.len();
        let (l0, l1) = (self.gain_grid[0].ln(), self.gain_grid[m - 1].ln());
        let step = (l1 - l0) / (m - 1) as f64;
        let ps = self.p.ps;
        let r_grid = &self.r_grid;
        let gg = &self.gain_grid;
        // Bin m collects gains above the grid.
        let hist = self
            .ar
            .par_chunks(1 << 16)
            .map(|chunk| {
                let mut h = vec![0u32; nr * (m + 1)];
                for &(ar1, ar2) in chunk {
                    let (a, l) = wyner_ziv(ar1, ar2, d, ps);
                    let ri = r_grid.partition_point(|&r| r <= l);
                    if ri == nr {
                        continue;
                    }
                    let gi = if a <= gg[0] {
                        0
                    } else if a > gg[m - 1] {
                        m
                    } else {
                        let j = (((a.ln() - l0) / step).ceil() as usize).min(m - 1);
                        if j > 0 && a <= gg[j - 1] {
                            j - 1
                        } else if a > gg[j] {
                            j + 1
                        } else {
                            j
                        }
                    };
                    h[ri * (m + 1) + gi] += 1;
                }
                h
            })
            .reduce(
                || vec![0u32; nr * (m + 1)],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        let mut le = vec![vec![0u32; m]; nr];
        let mut total = vec![0u32; nr];
        let mut run = vec![0u32; m + 1];
        for r in 0..nr {
            for (x, y) in run.iter_mut().zip(&hist[r * (m + 1)..(r + 1) * (m + 1)]) {
                *x += y;
            }
            let mut acc = 0u32;
            for g in 0..m {
                acc += run[g];
                le[r][g] = acc;
            }
            total[r] = acc + run[m];
        }
        CfCounts { le, total }
    }

    /// Best single-layer throughput at distortion `d`: `(value, s, R_r)`.
    pub fn throughput_at(&self, d: f64) -> (f64, f64, f64) {
        let c = self.counts(d);
        let n = self.ar.len() as f64;
        let mut best = (0.0, self.gain_grid[0], self.r_grid[0]);
        for (ri, &r) in self.r_grid.iter().enumerate() {
            let q2 = mac_probability(self.p.pr, r);
            if (c.total[ri] as f64 / n) * q2 * (self.p.ps * GAIN_HI).ln_1p() <= best.0 {
                continue;
            }
            for (gi, &s) in self.gain_grid.iter().enumerate() {
                let v = (c.total[ri] - c.le[ri][gi]) as f64 / n * q2 * (self.p.ps * s).ln_1p();
                if v > best.0 {
                    best = (v, s, r);
                }
            }
        }
        best
    }

    /// Best continuous-layer expected rate at distortion `d`:
    /// `(value, R_r, s0, s1)`.
    pub fn expected_rate_at(&self, d: f64) -> (f64, f64, f64, f64) {
        let c = self.counts(d);
        let n = self.ar.len() as f64;
        let mut best = (0.0, self.r_grid[0], 0.0, 0.0);
        for (ri, &r) in self.r_grid.iter().enumerate() {
            let tot = c.total[ri] as usize;
            if tot < MIN_CONDITIONAL {
                continue;
            }
            let weight = tot as f64 / n * mac_probability(self.p.pr, r);
            let raw: Vec<f64> = c.le[ri].iter().map(|&k| k as f64 / tot as f64).collect();
            let Ok(dist) = GainDistribution::from_cdf_values(self.gain_grid.clone(), &raw, TableSource::MonteCarlo) else {
                continue;
            };
            let Ok(cr) = continuous_expected_rate(&dist, self.p.ps, 1.0, S0Equation::Standard) else {
                continue;
            };
            let v = weight * cr.value_nats;
            if v > best.0 {
                best = (v, r, cr.param("s0").unwrap_or(0.0), cr.param("s1").unwrap_or(0.0));
            }
        }
        best
    }
}

pub fn cf_throughput(p: &PowerConfig) -> Result<RateResult> {
    cf_throughput_with(p, &McSettings::default())
}

/// Maximum over `(s, D, R_r)` of `Pr{L < R_r, a_CF ≥ s}·Pr{U > R_r}·ln(1 + P_s s)`.
pub fn cf_throughput_with(p: &PowerConfig, mc: &McSettings) -> Result<RateResult> {
    let samples = CfSamples::draw(p, mc.n, mc.seed(streams::CF))?;
    let r = maximize_scalar_with(|ld| samples.throughput_at(ld.exp()).0, samples.distortion_bracket(), D_SCAN);
    let d = r.argmax[0].exp();
    let (v, s, rr) = samples.throughput_at(d);
    let mut out = RateResult::new(v, "monte-carlo/grid").with_param("s", s).with_param("D", d).with_param("Rr", rr);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    Ok(out)
}

pub fn cf_expected_rate(p: &PowerConfig) -> Result<RateResult> {
    cf_expected_rate_with(p, &McSettings::default())
}

/// Maximum over `(D, R_r)` of `Pr{L < R_r}·Pr{U > R_r}` times the
/// continuous-layer rate of `a_CF` given `L < R_r`.
pub fn cf_expected_rate_with(p: &PowerConfig, mc: &McSettings) -> Result<RateResult> {
    let samples = CfSamples::draw(p, mc.n, mc.seed(streams::CF))?;
    let r = maximize_scalar_with(|ld| samples.expected_rate_at(ld.exp()).0, samples.distortion_bracket(), D_SCAN);
    let d = r.argmax[0].exp();
    let (v, rr, s0, s1) = samples.expected_rate_at(d);
    let mut out = RateResult::new(v, "continuous-layer/monte-carlo")
        .with_param("D", d)
        .with_param("Rr", rr)
        .with_param("s0", s0)
        .with_param("s1", s1);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    Ok(out)
}
