//! Front-end logic behind the `diamondbc` binary: sweep specifications,
//! evaluation dispatch, CSV/SVG emission and the validation suites.

pub mod app;
pub mod eval;
pub mod output;
pub mod sweep;
pub mod validate;

pub use eval::{evaluate, BoundTag, EvalOptions, Item, Layers, Metric, SchemeTag};
pub use output::{render_svg, write_csv, CsvRow, CSV_HEADER};
pub use sweep::{parse_grid, run_sweep, SweepOutcome, SweepSpec};
pub use validate::{run_suite, Budget, Check, Suite, Verdict};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const PARTIAL: i32 = 4;
    pub const VALIDATION: i32 = 5;
}

/// A rejected flag combination; reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub(crate) fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}
