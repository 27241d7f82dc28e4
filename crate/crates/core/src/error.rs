use crate::baselines::SpectralResult;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported moment order (a = {a}, b = {b})")]
    UnsupportedMoment { a: u32, b: u32 },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error(
        "iteration did not converge after {} steps (residual {:.3e})",
        .best.iterations,
        .best.residual
    )]
    Convergence { best: Box<SpectralResult> },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("empirical-null threshold requires calibration samples")]
    MissingCalibration,
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
