//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point is off the unit sphere: |x|^2 - 1 = {deviation:e}")]
    OffSphere { deviation: f64 },

    #[error("vector is not tangent at its base point: <base, v> = {dot:e}")]
    NotTangent { dot: f64 },

    #[error("cannot normalize a near-zero vector (norm = {norm:e})")]
    ZeroVector { norm: f64 },

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("points {i} and {j} coincide; the logarithmic energy is infinite")]
    CoincidentPoints { i: usize, j: usize },

    #[error("a configuration needs at least two points, got {0}")]
    TooFewPoints(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finder did not converge within the iteration budget")]
    RootFinderStalled,

    #[error("sampler failed after {attempts} attempts: {reason}")]
    SamplerFailed { attempts: u32, reason: String },

    #[error("input is not a minimizer: gradient inf-norm {grad_inf:e} exceeds {limit:e}")]
    NotAMinimizer { grad_inf: f64, limit: f64 },

    #[error("ledger has no entry for n = {0}; run a minimization for that n first")]
    MissingLedgerEntry(usize),

    #[error("ledger digest mismatch for n = {n}: entry records {expected}, stored points hash to {found}")]
    LedgerDigestMismatch {
        n: usize,
        expected: String,
        found: String,
    },

    #[error("ledger storage: {0}")]
    LedgerStorage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
