//! Network model: power budgets, Rayleigh block-fading realizations and the
//! counter-based random streams that make every Monte Carlo run reproducible.
//!
//! Sample `i` of a stream always occupies the same sixteen 32-bit words of the
//! ChaCha8 keystream, so a chunk starting at sample `i0` can be generated by
//! seeking — results never depend on how the work is split across threads.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};

/// Complex channel coefficient.
pub type ComplexGain = Complex64;

/// Master seed used when neither the caller nor the environment supplies one.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Environment variable overriding [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "DIAMONDBC_SEED";

/// Samples generated per parallel work unit.
pub const CHUNK: usize = 1 << 15;

const WORDS_PER_SAMPLE: u128 = 16;

/// Source and per-relay power budgets, linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub ps: f64,
    pub pr: f64,
}

impl PowerConfig {
    pub fn new(ps: f64, pr: f64) -> Result<Self> {
        for (name, v) in [("ps", ps), ("pr", pr)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain("PowerConfig::new", format!("{name} = {v} must be finite and > 0")));
            }
        }
        Ok(Self { ps, pr })
    }

    pub fn from_db(ps_db: f64, pr_db: f64) -> Result<Self> {
        Self::new(db_to_linear(ps_db), db_to_linear(pr_db))
    }

    /// `P_r / P_s`.
    pub fn ratio(&self) -> f64 {
        self.pr / self.ps
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("linear_to_db", format!("x = {x} must be > 0")));
    }
    Ok(10.0 * x.log10())
}

/// One block-fading realization of the four links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSample {
    pub h1: ComplexGain,
    pub h2: ComplexGain,
    pub hr1: ComplexGain,
    pub hr2: ComplexGain,
    pub a1: f64,
    pub a2: f64,
    pub ar1: f64,
    pub ar2: f64,
}

impl FadingSample {
    pub fn from_coeffs(h1: ComplexGain, h2: ComplexGain, hr1: ComplexGain, hr2: ComplexGain) -> Self {
        Self { h1, h2, hr1, hr2, a1: h1.norm_sqr(), a2: h2.norm_sqr(), ar1: hr1.norm_sqr(), ar2: hr2.norm_sqr() }
    }

    /// A realization with real, nonnegative coefficients of the given power gains.
    pub fn from_gains(a1: f64, a2: f64, ar1: f64, ar2: f64) -> Self {
        let re = |a: f64| Complex64::new(a.max(0.0).sqrt(), 0.0);
        Self { h1: re(a1), h2: re(a2), hr1: re(ar1), hr2: re(ar2), a1, a2, ar1, ar2 }
    }
}

/// Identifies a reproducible sample sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// Same master seed, different substream.
    pub fn with_stream(self, stream_index: u64) -> Self {
        Self { stream_index, ..self }
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self::new(DEFAULT_SEED, 0)
    }
}

/// Parses a decimal or `0x`-prefixed hexadecimal seed.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse::<u64>(),
    };
    parsed.map_err(|e| domain("parse_seed", format!("{text:?}: {e}")))
}

/// Master seed from [`SEED_ENV`], or [`DEFAULT_SEED`] when unset.
pub fn master_seed_from_env() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Sequential fading generator positioned at an arbitrary sample index.
#[derive(Debug, Clone)]
pub struct FadingStream {
    rng: ChaCha8Rng,
}

impl FadingStream {
    pub fn new(seed: SeedSpec, first_sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
        rng.set_stream(seed.stream_index);
        rng.set_word_pos(first_sample as u128 * WORDS_PER_SAMPLE);
        Self { rng }
    }

    /// Uniform on (0, 1].
    #[inline]
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Circularly-symmetric unit-variance complex Gaussian (Box–Muller).
    #[inline]
    fn gaussian(&mut self) -> Complex64 {
        let r = (-self.uniform().ln()).sqrt();
        let (sin, cos) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        Complex64::new(r * cos, r * sin)
    }

    #[inline]
    pub fn next_sample(&mut self) -> FadingSample {
        let h1 = self.gaussian();
        let h2 = self.gaussian();
        let hr1 = self.gaussian();
        let hr2 = self.gaussian();
        FadingSample::from_coeffs(h1, h2, hr1, hr2)
    }
}

impl Iterator for FadingStream {
    type Item = FadingSample;

    fn next(&mut self) -> Option<FadingSample> {
        Some(self.next_sample())
    }
}

/// The first `n` realizations of `seed`'s stream.
pub fn sample_fading(seed: SeedSpec, n: usize) -> Vec<FadingSample> {
    let chunks = chunk_ranges(n);
    let parts: Vec<Vec<FadingSample>> = chunks
        .into_par_iter()
        .map(|(start, len)| FadingStream::new(seed, start as u64).take(len).collect())
        .collect();
    parts.concat()
}

fn chunk_ranges(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(|c| (c * CHUNK, CHUNK.min(n - c * CHUNK))).collect()
}

/// Folds `n` realizations chunk by chunk, in parallel, returning the chunk
/// accumulators in sample order. `fold` receives a stream already positioned
/// at the chunk start and the chunk length.
pub fn fold_chunks<A, F>(seed: SeedSpec, n: usize, fold: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut FadingStream, usize) -> A + Sync,
{
    chunk_ranges(n)
        .into_par_iter()
        .map(|(start, len)| {
            let mut stream = FadingStream::new(seed, start as u64);
            fold(&mut stream, len)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(25.0) - 316.227_766_016_837_9).abs() < 1e-9);
        for x in [-30.0, -3.0, 0.0, 7.5, 60.0] {
            assert!((linear_to_db(db_to_linear(x)).unwrap() - x).abs() < 1e-12);
        }
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn power_config_validation() {
        assert!(PowerConfig::new(1.0, 1.0).is_ok());
        assert!(PowerConfig::new(0.0, 1.0).is_err());
        assert!(PowerConfig::new(1.0, f64::INFINITY).is_err());
        assert!(PowerConfig::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn seed_parsing() {
        assert_eq!(parse_seed("24301").unwrap(), 24301);
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed(" 0xff ").unwrap(), 255);
        assert!(parse_seed("seed").is_err());
    }

    #[test]
    fn stream_position_is_seekable() {
        let seed = SeedSpec::new(7, 3);
        let all: Vec<_> = FadingStream::new(seed, 0).take(40).collect();
        let tail: Vec<_> = FadingStream::new(seed, 25).take(15).collect();
        assert_eq!(&all[25..], &tail[..]);
    }

    #[test]
    fn chunking_is_invisible() {
        let seed = SeedSpec::new(11, 0);
        let n = CHUNK * 2 + 17;
        let whole: Vec<_> = FadingStream::new(seed, 0).take(n).collect();
        assert_eq!(sample_fading(seed, n), whole);
    }

    #[test]
    fn streams_differ() {
        let a = sample_fading(SeedSpec::new(1, 0), 4);
        let b = sample_fading(SeedSpec::new(1, 1), 4);
        assert_ne!(a, b);
    }
}
