//! Throughput and expected-rate engines for the two-relay diamond channel
//! under Rayleigh block fading, with single-layer and broadcast (multi-layer)
//! coding at the source.
//!
//! * [`channel`] — power budgets, fading realizations, reproducible streams.
//! * [`gains`] — equivalent scalar gains of each relaying scheme and their
//!   tabulated distributions.
//! * [`schemes`] — DF, AF, DAF and CF rate engines.
//! * [`bounds`] — closed-form upper bounds.
//! * [`mc_oracle`] — per-realization protocol simulation used as ground truth.
//!
//! All rates are in nats.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod gains;
pub mod mc_oracle;
pub mod numerics;
pub mod schemes;

pub use channel::{db_to_linear, linear_to_db, FadingSample, PowerConfig, SeedSpec};
pub use error::{Error, Result};
pub use schemes::RateResult;
