use thiserror::Error;

use crate::solver::Trace;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("samples have length {got}, grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("samples live on different grids")]
    GridMismatch,

    #[error("wave function is not normalized: integral of u^2 is {norm}")]
    NotNormalized { norm: f64 },

    #[error("argument has nonzero mean {mean} (tolerance {tol})")]
    NonZeroMean { mean: f64, tol: f64 },

    #[error("negative density value {value} at node {index}")]
    NegativeInput { index: usize, value: f64 },

    #[error("background charge must be nonpositive, found {value} at node {index}")]
    PositiveBackground { index: usize, value: f64 },

    #[error("background carries no charge")]
    NoCharge,

    #[error("grid spacing {h} too coarse, need h <= {max_h}")]
    UnderResolved { h: f64, max_h: f64 },

    #[error("grid half-width {half_width} too small, need at least {required}")]
    GridTooSmall { half_width: f64, required: f64 },

    #[error("eigen-solver failed to converge: {0}")]
    NoConvergence(String),

    #[error("no convergence after {} iterations", .trace.len())]
    MaxIterExceeded { trace: Trace },

    #[error("energy diverging (E = {energy}, tail mass {tail_mass}): subcritical charge ratio z = {z}")]
    DivergingEnergy { z: f64, energy: f64, tail_mass: f64 },

    #[error("line search stalled at step {step} after {iterations} iterations")]
    LineSearchStalled { step: f64, iterations: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("background file: {0}")]
    BackgroundFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
