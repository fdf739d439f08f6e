use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("x = {x} is outside the domain or at a pole")]
    Domain { x: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("q selection failed: {0}")]
    SelectionFailure(String),
    #[error("degenerate extreme point: g''(x_m) = 0 at x_m = {x_m}")]
    DegenerateExtreme { x_m: f64 },
    #[error("no bound state with n = {n}")]
    NoBoundState { n: usize },
    #[error("classification mismatch: {0}")]
    Classification(String),
    #[error("unsupported turning-point topology: {0}")]
    UnsupportedTopology(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("method not applicable: {0}")]
    MethodInapplicable(String),
    #[error("boundary condition incompatible with topology: {0}")]
    Boundary(String),
    #[error("energy {energy} is {distance:e} away from the nearest eigenvalue")]
    OffShell { energy: f64, distance: f64 },
    #[error("argument out of supported range: {0}")]
    Range(String),
    #[error("overflow; scaled value {scaled} (true value = scaled * exp({log_scale}))")]
    Overflow { scaled: f64, log_scale: f64 },
    #[error("grid too small: {0}")]
    Extent(String),
    #[error("energy {energy} is below the asymptotic level {level}")]
    NoScattering { energy: f64, level: f64 },
}

impl Error {
    /// Whether the error reflects bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Domain { .. }
                | Error::Unsupported(_)
                | Error::NoBoundState { .. }
                | Error::MethodInapplicable(_)
                | Error::Boundary(_)
                | Error::OffShell { .. }
                | Error::Range(_)
                | Error::NoScattering { .. }
                | Error::Classification(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
