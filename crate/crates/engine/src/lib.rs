//! One convex-integration step at a time: energy gaps, amplitudes, the wave
//! perturbation, the four stress families and the residual of the relaxed
//! momentum equation, evaluated lazily level by level.

pub mod amplitude;
pub mod config;
pub mod diagnostics;
pub mod energy;
pub mod fd;
pub mod level;
pub mod profile;
pub mod residual;
pub mod stress;

pub use amplitude::{amplitudes, Amplitudes, Saturation};
pub use config::{EngineConfig, GuardPolicy};
pub use energy::{hamiltonian, nonlinearity, pressure_recover, rho, weak_form_residual, TestFunction};
pub use level::{Packet, Scheme, Waves};
pub use profile::{Profile, ProfileKind};
pub use residual::{Budget, ResidualReport};
pub use stress::{StressBundle, StressDiagnostics};

use sqgci_operators::OperatorError;
use sqgci_pseudo::PseudoError;
use sqgci_transport::TransportError;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("level {level}, cutoff {j}: |R|/(λρ) = {ratio:.4} exceeds ε_γ = {limit:.4}")]
    Guard { level: usize, j: i64, ratio: f64, limit: f64 },
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Pseudo(#[from] PseudoError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}
