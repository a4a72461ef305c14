//! Special functions and generic numeric primitives shared by every engine.
//!
//! Everything here is a pure function of its arguments.

mod optimize;
mod quadrature;
mod roots;
mod special;

pub use optimize::{maximize_nd, maximize_nd_with, maximize_scalar, maximize_scalar_with, NdOptions, OptimResult, COARSE_SCAN_POINTS};
pub use quadrature::{gauss_legendre, gauss_legendre_on, integrate, MAX_DEPTH};
pub use roots::{find_root, first_sign_change, Bracket};
pub use special::{exp_integral_e1, lambert_w_m1};

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
