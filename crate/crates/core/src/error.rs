use thiserror::Error;

/// Errors raised by the measure, inequality, and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("measures are defined on different atom sets")]
    AtomMismatch,

    #[error("duplicate atom label `{0}`")]
    DuplicateAtom(String),

    #[error("negative or non-finite weight {value} at atom {index}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),

    #[error("empty measure")]
    Empty,

    #[error("grids differ: m = {0} vs m = {1}")]
    GridMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bandwidth r_n = {r_n} exceeds {limit}; need n >= {n_min}")]
    BandwidthTooLarge { r_n: f64, limit: f64, n_min: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
