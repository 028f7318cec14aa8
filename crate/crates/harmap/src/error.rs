use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: point has dimension {point}, space expects {space}")]
    DimensionMismatch { point: usize, space: usize },

    #[error("point does not belong to the given space: {0}")]
    WrongSpace(String),

    #[error("geodesic is not unique: points at distance {dist} (>= pi)")]
    AntipodalPoints { dist: f64 },

    #[error("ball constraint invalid: radius {tau} not in (0, pi/4)")]
    InvalidBallRadius { tau: f64 },

    #[error("points are not contained in an admissible ball (enclosing radius {radius:.6} >= pi/4)")]
    NoAdmissibleBall { radius: f64 },

    #[error("iteration did not converge after {iterations} steps (last move {last_move:.3e})")]
    NonConvergence { iterations: usize, last_move: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mesh resolution insufficient: {0}")]
    Resolution(String),

    #[error("point ({0:.6}, ...) outside the meshed domain")]
    OutsideDomain(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
