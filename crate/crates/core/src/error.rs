use thiserror::Error;

/// Errors raised by the numeric primitives and rate engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {flo}, f(hi) = {fhi})")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("integrand is not finite at s = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("degenerate quantizer: theta{relay} = {theta} (distortion {distortion})")]
    DegenerateQuantizer { relay: u8, theta: f64, distortion: f64 },

    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: usize, needed: usize },

    #[error("{which} boundary not found: {detail}")]
    BoundaryNotFound { which: &'static str, detail: String },

    #[error("unsupported layer count {0} (supported: 1, 2, 3)")]
    UnsupportedLayers(usize),

    #[error("gain table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { op, detail: detail.into() }
}
