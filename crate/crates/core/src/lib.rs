//! Numerical verification of Hubbard-Stratonovich transformations on real
//! hyperbolic Pruisken-Schäfer domains.
//!
//! The low-level layers ([`linalg`], [`specfun`], [`measures`],
//! [`quadrature`]) are generic over [`num_traits::Float`]; the Vandermonde
//! and sector helpers only need [`num_traits::Signed`] and so also accept
//! exact rationals. The reduced integrals in [`reductions`] and the verdicts
//! in [`verifiers`] are fixed to `f64`, since their tolerances are far below
//! single precision.
//!
//! ```
//! use hyperhs::{reductions, QuadConfig};
//!
//! let f = reductions::f_o21(0.5, &QuadConfig::default()).unwrap();
//! assert!((f.value.re - 1.0).abs() < 1e-8);
//! ```

pub mod checks;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod reductions;
pub mod spectral;
pub mod specfun;
pub mod verifiers;

pub use quadrature::{QuadConfig, QuadError};

/// Errors shared by every module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("result overflows the floating-point range")]
    Overflow,
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("inadmissible source matrix: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub type Matrix = linalg::Matrix<f64>;
pub type CosetPoint = linalg::CosetPoint<f64>;
pub type Spectrum = measures::Spectrum<f64>;
pub type PolarPoint = measures::PolarPoint<f64>;
pub type QuadResult = quadrature::QuadResult<f64>;
pub type Complex = num_complex::Complex<f64>;

pub use linalg::{Curvature, Signature};
pub use reductions::{SourceDiag, XwzCoords};
pub use measures::Measure;
pub use verifiers::{FitReport, GaussianityReport};
