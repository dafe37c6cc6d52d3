use thiserror::Error;

/// Errors raised by the comparison kernel, the needle engine and the
/// discrete decomposition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("curvature {k} is outside the normalized trichotomy {{N-1, 0, -(N-1)}} for N = {n}")]
    UnsupportedCurvature { k: f64, n: f64 },

    #[error("comparison radius is infinite (ball condition fails)")]
    InfiniteRadius,

    #[error("{0} class of the subset is empty")]
    EmptyClass(&'static str),

    #[error("sample size {points} exceeds the cap of {cap} points")]
    SizeCap { points: usize, cap: usize },

    #[error("ray {0} has fewer than two points")]
    EmptyRay(usize),

    #[error("selected rays carry zero surface mass")]
    ZeroSurfaceMass,

    #[error("no admissible perturbation found on the search grid")]
    NoMargin,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
