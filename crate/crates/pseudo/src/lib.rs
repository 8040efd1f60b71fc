//! Bilinear Fourier operators: the symbol `s^m`, the pseudo-product `S^m`,
//! the operator `T` with its gradient plus divergence split, and the
//! oscillation tensors `Q` with their principal parts.

pub mod oscillation;
pub mod product;
pub mod symbol;

pub use oscillation::{m_kr, m_star, oscillation_q, principal_part, PrincipalInputs, QSplit};
pub use product::{nonlinear_t, pseudo_product, t_decomposition, PseudoProductPlan, TDecomposition};
pub use symbol::{segment_clearance, SymbolQuadrature};

#[derive(Debug, thiserror::Error)]
pub enum PseudoError {
    #[error("s^m is undefined at (0, 0)")]
    BothZero,
    #[error("{pairs} lattice pairs exceed the budget of {budget}; localize the inputs first")]
    Budget { pairs: usize, budget: usize },
    #[error("output mode ({k1}, {k2}) is not resolved on an {n}-point grid")]
    Unresolved { k1: i64, k2: i64, n: usize },
    #[error("inputs live on different grids")]
    GridMismatch,
    #[error("segment for pair {zeta:?}, {eta:?} comes too close to the origin")]
    Guard { zeta: [i64; 2], eta: [i64; 2] },
    #[error("mode ({k1}, {k2}) lies outside the localization ball")]
    NotLocalized { k1: i64, k2: i64 },
    #[error("input has nonzero mean")]
    NonzeroMean,
}
