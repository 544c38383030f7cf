//! Hyperbolic polynomial operators on real symmetric matrices: Gårding
//! eigenvalues and cones, centrality, and numerical checks of determinant
//! majorization.
//!
//! The matrix and polynomial layers are generic over [`scalar::Scalar`]; the
//! operator and analysis layers work in `f64`.

/// Version of this crate, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod analysis;
pub mod error;
pub mod majorization;
pub mod matrix;
pub mod operator;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod tree;
pub mod univariate;

pub use analysis::{CentralityResult, ConeCertificate, EigenList};
pub use error::{Error, Result};
pub use majorization::{GradientDetBound, MajorizationReport};
pub use matrix::{SpectralDecomposition, Square, SymMatrix};
pub use operator::{Builtin, Flags, GardingOperator, Kind, LinearMap};
pub use poly::SparsePoly;
pub use report::{CheckReport, Witness};
pub use tree::parse_spec;

pub type SymMatrixF64 = SymMatrix<f64>;
pub type SymMatrixF32 = SymMatrix<f32>;
pub type SquareF64 = Square<f64>;
pub type SquareF32 = Square<f32>;
pub type SparsePolyF64 = SparsePoly<f64>;
pub type SparsePolyF32 = SparsePoly<f32>;
