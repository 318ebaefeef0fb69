use thiserror::Error;

/// Errors produced by partition construction, sampling and discrepancy evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// An angle outside `[0, π/2]` (or not finite).
    #[error("theta = {0} is outside [0, pi/2]")]
    ThetaDomain(f64),

    /// Partition parameters violating `m >= d >= 2`, or an overflowing `m^d`.
    #[error("invalid partition parameters: {0}")]
    InvalidSpec(String),

    /// A polygon that is not convex, has too few vertices, or has no area.
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    /// A caller-supplied argument that the operation cannot accept.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed point-set file at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// `true` for errors caused by bad input rather than by the environment.
    pub fn is_argument_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
