use thiserror::Error;

use crate::grid::BoundaryCondition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("fractional order alpha = {alpha} outside {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("model {model} does not support {bc} boundary conditions")]
    UnsupportedBoundary {
        model: String,
        bc: BoundaryCondition,
    },

    #[error("model {model}: {reason}")]
    Model { model: String, reason: String },

    #[error("non-finite value in stage {stage} of step {step} (t = {time})")]
    Divergence {
        stage: &'static str,
        step: usize,
        time: f64,
    },

    #[error("time schedule: {0}")]
    Schedule(String),

    #[error("dense oracle: {0}")]
    Oracle(String),

    #[error("root finder did not converge at theta = {theta} (residual {residual:e})")]
    RootFinder { theta: f64, residual: f64 },

    #[error("convergence order needs strictly positive errors, got {coarse} and {fine}")]
    NonPositiveError { coarse: f64, fine: f64 },
}
