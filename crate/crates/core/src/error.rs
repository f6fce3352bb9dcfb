//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the library.
///
/// Variants carry enough context to tell the caller what to change; none of
/// them is used for control flow inside a successful computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlkgError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("amplitude {amplitude:.6e} exceeds the model cap {cap:.6e}")]
    AmplitudeOverflow { amplitude: f64, cap: f64 },
    #[error("scaling pair (alpha={alpha}, beta={beta}) is not admissible in d={d}")]
    InadmissiblePair { alpha: f64, beta: f64, d: usize },
    #[error("rescaled field loses {lost:.3e} of its L2 mass outside the grid")]
    TruncationLoss { lost: f64 },
    #[error("no root of K along the scaling ray")]
    NoRoot,
    #[error("the field does not lie on the Nehari manifold (K = {k:.3e})")]
    NotOnNehari { k: f64 },
    #[error("could not bracket the shooting parameter: {0}")]
    BracketFailure(String),
    #[error("shooting did not converge: {0}")]
    NonConvergence(String),
    #[error("Trudinger-Moser ratio estimate is unstable: {0}")]
    TmEstimateUnstable(String),
    #[error("grid size {0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error("cutoff radius {radius} does not fit inside the box of side {side}")]
    CutoffExceedsBox { radius: f64, side: f64 },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("constraint set is empty: {0}")]
    EmptyConstraint(String),
    #[error("run aborted: {0}")]
    RunAborted(String),
    #[error("integrand is not finite at field value {value}")]
    NonFiniteIntegrand { value: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("constrained descent stalled: {0}")]
    MinimizerStalled(String),
    #[error("model is outside the admissible class: {0}")]
    ModelOutsideClass(String),
    #[error("numerical breakdown at t = {t}: {reason}")]
    NumericalBreakdown { t: f64, reason: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for NlkgError {
    fn from(e: std::io::Error) -> Self {
        NlkgError::Io(e.to_string())
    }
}

impl From<csv::Error> for NlkgError {
    fn from(e: csv::Error) -> Self {
        NlkgError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for NlkgError {
    fn from(e: serde_json::Error) -> Self {
        NlkgError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NlkgError>;
