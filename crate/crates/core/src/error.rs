use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field data contains non-finite values")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad magic: expected PFLD")]
    BadMagic,

    #[error("unsupported PFLD version {0}")]
    UnsupportedVersion(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("under-resolved mollifier: delta {delta} is below one grid cell ({cell})")]
    UnderResolvedMollifier { delta: f64, cell: f64 },

    #[error("insufficient scales: need at least {needed}, got {got}")]
    InsufficientScales { needed: usize, got: usize },

    #[error("zero norm in scan")]
    ZeroNormInScan,

    #[error("t-range too narrow: integrand has not decayed at the endpoints")]
    TRangeTooNarrow,

    #[error("input is not divergence-free: |div| = {0:.3e}")]
    NotDivergenceFree(f64),

    #[error(
        "resolution too small for dealiased product: {0:.3e} of the energy lies above the cutoff"
    )]
    ResolutionTooSmall(f64),

    #[error("CFL violation: max|u| dt / dx = {0:.3}")]
    CflViolation(f64),

    #[error("too few snapshots: need {needed}, got {got}")]
    TooFewSnapshots { needed: usize, got: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
