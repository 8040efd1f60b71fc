use sqgci_transport::SchemeParams;

use crate::profile::Profile;
use crate::EngineError;

/// What to do when `‖R̊‖/(λρ)` leaves the ball where the geometric lemma applies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GuardPolicy {
    Abort,
    /// Shrink `R̊/(λρ)` radially onto a smaller ball; exact inside `ε_γ`.
    Saturate,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub params: SchemeParams,
    pub q_max: usize,
    /// Points per side on the finest level.
    pub grid_n: usize,
    pub profile: Profile,
    pub guard: GuardPolicy,
    /// Gauss-Legendre nodes per segment for `s^m`.
    pub nodes: usize,
    /// FD step as a fraction of `τ`.
    pub fd_fraction: f64,
    /// Velocity history samples per `τ`.
    pub history_per_tau: usize,
}

impl EngineConfig {
    pub fn new(params: SchemeParams, q_max: usize, grid_n: usize, profile: Profile) -> Self {
        Self { params, q_max, grid_n, profile, guard: GuardPolicy::Saturate, nodes: 32, fd_fraction: 2.5e-4, history_per_tau: 16 }
    }

    /// Number of constructed levels `1..=q_max+1`.
    pub fn levels(&self) -> usize {
        self.q_max + 1
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let top = self.params.lambda(self.levels());
        if (self.grid_n as f64) < 4.0 * top {
            return Err(EngineError::Resolution(format!(
                "grid_n = {} is below 4·λ_{} = {}",
                self.grid_n,
                self.levels(),
                4.0 * top
            )));
        }
        if self.grid_n % 2 != 0 {
            return Err(EngineError::Config(format!("grid_n = {} must be even", self.grid_n)));
        }
        if !(self.fd_fraction > 0.0 && self.fd_fraction <= 0.01) {
            return Err(EngineError::Config(format!("fd_fraction = {} outside (0, 0.01]", self.fd_fraction)));
        }
        if self.nodes < 2 || self.history_per_tau < 4 {
            return Err(EngineError::Config("quadrature nodes >= 2 and history_per_tau >= 4 required".into()));
        }
        Ok(())
    }
}
