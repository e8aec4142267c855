//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction with invalid side lengths.
    #[error("grid {n1}x{n2} invalid: side lengths must be even and at least 8")]
    InvalidGrid { n1: usize, n2: usize },

    /// Two operands live on different grids.
    #[error("grid mismatch: {a1}x{a2} vs {b1}x{b2}")]
    GridMismatch { a1: usize, a2: usize, b1: usize, b2: usize },

    /// A field that must have vanishing average in x1 does not.
    #[error("field has nonzero x1-average: max |line mean| = {found:.3e} exceeds {tol:.3e}")]
    NonzeroX1Average { found: f64, tol: f64 },

    /// Negative fractional power of |∂₁| applied to a field with k1 = 0 content.
    #[error("|d1|^{order} requires vanishing k1=0 content, found relative magnitude {content:.3e}")]
    ZeroModeContent { order: f64, content: f64 },

    /// Smoothing with a nonpositive scale.
    #[error("smoothing scale must be positive, got {0}")]
    NonpositiveScale(f64),

    /// Norm exponent inside the guard band of a critical value.
    #[error("exponent {value} is within {guard} of the critical set {{{critical}}}")]
    CriticalExponent { value: f64, critical: String, guard: f64 },

    /// Norm exponent outside its admissible range.
    #[error("exponent {value} outside admissible range {range} for {kind}")]
    ExponentRange { kind: &'static str, value: f64, range: &'static str },

    /// A scalar or structural parameter failed validation.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Lattice-noise cell count finer than the grid.
    #[error("lattice cells {cells} exceed grid size {n} along axis {axis}")]
    LatticeTooFine { cells: usize, n: usize, axis: u8 },

    /// A Monte-Carlo statistic produced a non-finite value.
    #[error("non-finite value at sample index {sample_index}: {context}")]
    NonFinite { sample_index: usize, context: String },

    /// Numerical abort outside a sample loop (for example during descent).
    #[error("numerical abort: {0}")]
    Numerical(String),

    /// Run-configuration error; the field name leads the message.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// On-disk format violation (magic, version, truncation).
    #[error("field file {path}: {reason}")]
    Format { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical aborts, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } => 2,
            Error::NonFinite { .. } | Error::Numerical(_) => 3,
            _ => 1,
        }
    }
}
