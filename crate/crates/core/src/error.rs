use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A spec violates its own invariants (empty factor list, alpha out of
    /// range, zero modulus, ...).
    #[error("invalid compactification spec: {0}")]
    InvalidSpec(String),

    /// A window violates its invariants or cannot be represented.
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    /// A point or window does not have the shape the spec prescribes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A scalar argument is out of its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The scan range cannot hold a single averaging window.
    #[error("scan range shorter than one window: {0}")]
    RangeTooShort(String),

    /// A sequence slice was evaluated outside its covered range.
    #[error("index {index} outside slice range [{start}, {end}]")]
    OutOfRange { index: i64, start: i64, end: i64 },

    /// JSON (de)serialization failure, with position info from serde.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
