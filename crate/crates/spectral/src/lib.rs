//! Fourier collocation on the periodic square [-π, π)².
//!
//! Fields are stored by their coefficients `c_k` in the expansion
//! `f(x) = Σ c_k e^{ik·x}`, so the zero mode is the mean.

pub mod bump;
pub mod dump;
pub mod fft;
pub mod field;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod random;

pub use field::{MatrixField, ScalarField, SymMatrixField, VectorField};
pub use grid::{friendly_size, Grid};
pub use num_complex::Complex64 as C64;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("grid size {0} must be even and at least 8")]
    BadGrid(usize),
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("dump format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
