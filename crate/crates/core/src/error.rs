use thiserror::Error;

use crate::solver::Solution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} family `{name}`")]
    UnknownFamily { kind: &'static str, name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("fibering map undefined for the zero field")]
    ZeroField,

    #[error(
        "no sign change of the fibering derivative in [2^-60, 2^60] (last scale tried {last_scale:.3e})"
    )]
    DegenerateFiber { last_scale: f64 },

    #[error("ground-state iteration stopped after {} iterations with gradient norm {:.3e}", .0.iterations, .0.grad_norm)]
    NotConverged(Box<Solution>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sample ({r}, {s}) lies outside the cylindrical grid")]
    OutsideGrid { r: f64, s: f64 },

    #[error("fit window [{lo}, {hi}] holds too few valid samples ({count})")]
    EmptyWindow { lo: f64, hi: f64, count: usize },

    #[error("malformed field dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
