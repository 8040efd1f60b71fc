//! Time cutoffs, scheme parameters, back-to-labels maps traced along the
//! transport velocity, and material derivatives.

pub mod evaluator;
pub mod flow;
pub mod material;
pub mod params;
pub mod partition;

pub use evaluator::FieldEvaluator;
pub use flow::{solve_flow_map, FlowMap, VelocityHistory};
pub use params::SchemeParams;
pub use partition::TimePartition;

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("step {dt:e} too large for |∇u| ≈ {grad:e}; use at least {required} substeps per sample")]
    Cfl { dt: f64, grad: f64, required: usize },
    #[error("invalid scheme parameters: {0}")]
    Params(String),
}
