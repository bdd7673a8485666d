use thiserror::Error;

/// Errors raised by the solver and the verification harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inconsistent sizes, bandwidths or parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A requested padded grid would exceed the memory guard.
    #[error("resource error: {0}")]
    Resource(String),

    /// Input refused because an exact (brute-force) routine would be too costly.
    #[error("refused: {0}")]
    Refused(String),

    /// The state stopped being finite.
    #[error("blow-up at t = {time}: non-finite coefficients")]
    BlowUp { time: f64 },

    /// Adaptive step size fell below the floor.
    #[error("step size underflow at t = {time}: dt = {dt:e} below dt_min")]
    Stiffness { time: f64, dt: f64 },

    /// Input data unusable for a statistic (non-positive values, too few points).
    #[error("data error: {0}")]
    Data(String),

    /// Sample where the right-hand side of an inequality vanishes.
    #[error("degenerate sample: right-hand side is zero")]
    Degenerate,

    /// Quadrature could not reach the requested tolerance.
    #[error("accuracy error: achieved bound {achieved:e} exceeds tolerance {tolerance:e}")]
    Accuracy { achieved: f64, tolerance: f64 },

    /// Malformed binary snapshot.
    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
