use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be even, got {0}")]
    OddDimension(usize),

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {defect:e}")]
    NotSymmetric { row: usize, col: usize, defect: f64 },

    #[error("matrix is not orthogonal: max |hᵗh - I| = {0:e}")]
    NotOrthogonal(f64),

    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("nonsymmetric eigensolver did not converge")]
    CompanionNoConvergence,

    #[error("operator of degree {0} has no radial derivative")]
    DegreeTooLow(usize),

    #[error("degenerate direction: g(B) = {0:e}")]
    DegenerateDirection(f64),

    #[error("not a polynomial of the declared degree: interpolation residual {0:e}")]
    NotPolynomial(f64),

    #[error("non-real spectrum: realness residual {0:e}")]
    NonRealSpectrum(f64),

    #[error("polynomial is not homogeneous: term degrees {min}..{max}")]
    NotHomogeneous { min: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spec error at {path}: {message}")]
    Spec { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
