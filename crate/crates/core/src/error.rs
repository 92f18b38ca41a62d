use thiserror::Error;

/// Errors raised by the dynamics toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A partial derivative (or value) is not finite.
    #[error("non-finite derivative with respect to {coordinate}")]
    NonFinite { coordinate: &'static str },

    /// The Kepler force centre `|x| = 0` (or a point too close to it).
    #[error("position at the force centre (|x| = {radius:e})")]
    Singularity { radius: f64 },

    /// A map or chart that excludes the coordinate origin was evaluated there.
    #[error("{what} is undefined at the origin")]
    Origin { what: &'static str },

    /// The natural stereographic chart left its domain (`1 + k|x|²/4 <= 0`).
    #[error("outside the stereographic chart: conformal factor {factor:e} <= 0 (k = {k})")]
    ChartBoundary { k: f64, factor: f64 },

    /// A parameter value the theory explicitly excludes.
    #[error("excluded case: {0}")]
    Excluded(String),

    /// Mutually inconsistent parameters (for example a repulsive branch with `k >= 0`).
    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),

    /// Invalid input data or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Sampling too coarse for the requested quadrature accuracy.
    #[error("insufficient resolution: error estimate {estimate:e} above tolerance {tolerance:e}")]
    Resolution { estimate: f64, tolerance: f64 },

    /// Two trajectories that should share a sample grid do not.
    #[error("sample grids are not aligned: {0}")]
    Alignment(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
