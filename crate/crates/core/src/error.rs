use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfmError {
    #[error("generator is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("linear algebra routine did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid two-level subspace ({j}, {k}) for a ququart")]
    InvalidSubspace { j: usize, k: usize },

    #[error("site {site} out of range for a register of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("{sites} sites exceeds the dense limit of {max}")]
    DimensionTooLarge { sites: usize, max: usize },

    #[error("synthesis residual {residual:e} exceeds tolerance {tolerance:e}")]
    SynthesisResidual { residual: f64, tolerance: f64 },

    #[error("bond ({a}, {b}) is not register-adjacent; its hopping term carries a string on {string_len} intermediate sites")]
    NonLocalBond { a: usize, b: usize, string_len: usize },

    #[error("hopping term index {0} is not in 1..=4")]
    InvalidHoppingTerm(u8),

    #[error("series is empty")]
    EmptySeries,

    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QfmError>;
