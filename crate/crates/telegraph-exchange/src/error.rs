use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("{field} must be {requirement}, got {value}")]
    InvalidParameter {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("expected a {expected} matrix or vector, got {got}")]
    Dimension { expected: String, got: String },

    #[error("matrix is not a valid density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("matrix is not unitary (deviation {deviation:.2e} exceeds {tolerance:.2e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("time {t} outside trajectory window [0, {duration}]")]
    OutsideWindow { t: f64, duration: f64 },

    #[error("quadrature failed to converge: requested {requested:.2e}, achieved {achieved:.2e}")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },

    #[error(
        "kernel at sigma_H eigenvalue {eigenvalue} is {value:.6e}; \
         the logarithm in the spectral composition requires positive kernels \
         (alpha*t={alpha_t:.6}, lambda*t={lambda_t:.6})"
    )]
    NonPositiveKernel {
        eigenvalue: f64,
        value: f64,
        alpha_t: f64,
        lambda_t: f64,
    },

    #[error("spectral distribution weights must be normalized: total {total} (tolerance {tolerance:.1e})")]
    NotNormalized { total: f64, tolerance: f64 },

    #[error("{0}")]
    Invalid(String),
}
