use thiserror::Error;

/// Errors raised by the quantifier library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcError {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("reduced state is singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularMarginal { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("direction is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error(
        "correlation matrix has no preferred plane (largest eigenvalue of T^T T = {largest:e})"
    )]
    DegenerateCorrelation { largest: f64 },

    #[error("{count} axes exceed the enumeration limit of {limit}")]
    TooManyAxes { count: usize, limit: usize },

    #[error("T n vanishes; optimal Alice direction is undefined")]
    ZeroCorrelation,

    #[error("filtered correlation matrix is not diagonal (off-diagonal entry {value:e})")]
    NonDiagonalCorrelation { value: f64 },

    #[error("transverse correlations differ: |T_x| = {tx}, |T_y| = {ty}")]
    TransverseAsymmetry { tx: f64, ty: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid axis set: {0}")]
    InvalidAxes(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no {measure} boundary crossing for theta in [{theta_min}, {theta_max}]")]
    NoBoundary {
        measure: String,
        theta_min: f64,
        theta_max: f64,
    },
}

pub type Result<T> = std::result::Result<T, QcError>;
