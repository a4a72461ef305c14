//! Explicit 2×2 Alamouti algebra at the destination.
//!
//! Over two channel uses the relays send `(x₁, x₂)` then `(−x₂*, x₁*)`. A
//! relay's contribution is fixed by the complex coefficient multiplying each
//! layer symbol and the coefficient multiplying its own forwarded receiver
//! noise, so each layer sees the Alamouti matrix `[[b₁, b₂], [b₂*, −b₁*]]`.
//! The destination matched-filters with `H_iᴴ` and reads signal,
//! interference and colored-noise powers off the resulting matrices.

use num_complex::Complex64;

use crate::channel::{FadingSample, PowerConfig};
use crate::schemes::MAX_LAYERS;

type M2 = [[Complex64; 2]; 2];

fn alamouti(b1: Complex64, b2: Complex64) -> M2 {
    [[b1, b2], [b2.conj(), -b1.conj()]]
}

fn adjoint(m: &M2) -> M2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Power that row 0 of `m` collects from a unit-power, white input vector.
fn row_power(m: &M2) -> f64 {
    m[0][0].norm_sqr() + m[0][1].norm_sqr()
}

/// One relay as seen from the destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlamoutiBranch {
    /// Coefficient of each unit-power layer symbol.
    pub layers: [Complex64; MAX_LAYERS],
    /// Coefficient of the relay's own unit-power receiver noise (nonzero only
    /// when it amplifies).
    pub noise: Complex64,
}

impl AlamoutiBranch {
    pub const SILENT: AlamoutiBranch =
        AlamoutiBranch { layers: [Complex64::new(0.0, 0.0); MAX_LAYERS], noise: Complex64::new(0.0, 0.0) };
}

/// SINR of layer `i` after matched filtering, with layers `< i` already
/// cancelled and layers `i+1..k` treated as noise.
pub fn alamouti_snr(r1: &AlamoutiBranch, r2: &AlamoutiBranch, k: usize, i: usize) -> f64 {
    let h = alamouti(r1.layers[i], r2.layers[i]);
    let w = adjoint(&h);
    let signal = mul(&w, &h)[0][0].norm_sqr();
    if signal == 0.0 {
        return 0.0;
    }
    let mut disturbance = row_power(&w); // destination noise
    disturbance += row_power(&mul(&w, &alamouti(r1.noise, r2.noise)));
    for j in i + 1..k {
        disturbance += row_power(&mul(&w, &alamouti(r1.layers[j], r2.layers[j])));
    }
    signal / disturbance
}

/// Destination mutual information when both relays amplify-and-forward
/// (`c_ℓ = √(P_r/(a_rℓP_s + 1))`), from the explicit Alamouti matrices.
pub fn alamouti_af_mutual_info(sample: &FadingSample, p: &PowerConfig) -> f64 {
    let b1 = amplify_branch(sample.h1, sample.hr1, sample.ar1, p.pr, &[p.ps]);
    let b2 = amplify_branch(sample.h2, sample.hr2, sample.ar2, p.pr, &[p.ps]);
    alamouti_snr(&b1, &b2, 1, 0).ln_1p()
}

/// A relay that scales its whole observation of the layers `powers` (source
/// powers per layer, listed from layer 0) to transmit power `budget`.
pub(crate) fn amplify_branch(
    h: Complex64,
    hr: Complex64,
    ar: f64,
    budget: f64,
    powers: &[f64],
) -> AlamoutiBranch {
    let observed: f64 = powers.iter().sum();
    let c = (budget / (ar * observed + 1.0)).sqrt();
    let mut out = AlamoutiBranch::SILENT;
    for (l, &g2) in out.layers.iter_mut().zip(powers) {
        *l = h * hr * c * g2.sqrt();
    }
    out.noise = h * c;
    out
}
