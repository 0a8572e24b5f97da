//! Error type shared across the library.

/// Errors produced by controller, plant, and simulation operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A quantity that must be finite came out NaN or infinite.
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// A parameter violated its domain (sign, range, or finiteness).
    #[error("invalid {what}: {value}")]
    InvalidParam { what: &'static str, value: f64 },

    /// dphi/ds is singular at s = 0.
    #[error("phi derivative is singular at s = 0")]
    SingularDerivative,

    /// Learning memory must cover at least one sample.
    #[error("iteration horizon must contain at least one sample")]
    EmptyHorizon,

    /// A trace did not match the configured horizon length.
    #[error("trace length {got} does not match horizon {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// A controller was stepped past the end of the iteration.
    #[error("sample cursor {cursor} overran horizon of {horizon} samples")]
    HorizonOverrun { cursor: usize, horizon: usize },

    /// Iteration rollover requested before the horizon was consumed.
    #[error("iteration rollover at cursor {cursor}, horizon {horizon} not consumed")]
    IncompleteIteration { cursor: usize, horizon: usize },

    /// An axis bank needs at least one axis, and step inputs must match it.
    #[error("axis count mismatch: bank has {expected}, got {got}")]
    AxisCountMismatch { expected: usize, got: usize },

    /// Cross-arm rotation left the validity region of the gantry model.
    #[error("cross-arm rotation singular: cos(theta) = {cos_theta} < {cos_min}")]
    RotationSingular { cos_theta: f64, cos_min: f64 },

    /// Metrics over an empty trace are undefined.
    #[error("empty trace")]
    EmptyTrace,

    /// Reference profile evaluated outside its domain.
    #[error("time {t} outside profile domain [0, {horizon}]")]
    OutOfDomain { t: f64, horizon: f64 },

    /// Simulation state blew up or left the sanity box.
    #[error("divergence at iteration {iteration}, sample {sample}: {what} = {value}")]
    Divergence {
        iteration: usize,
        sample: usize,
        what: &'static str,
        value: f64,
    },

    /// A diagnostic needed a trace column that the log does not carry.
    #[error("missing log column: {0}")]
    MissingColumn(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `value` is finite, tagging the error with `what`.
pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}
