use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh needs at least 3 elements for the nonlinear viscosity stencil, got {0}")]
    MeshTooCoarse(usize),

    #[error("cyclic tridiagonal solve failed: {0}")]
    SolverFailure(String),

    #[error("non-finite value at node {node} (t = {time})")]
    NonFiniteState { node: usize, time: f64 },

    #[error("meshes are incompatible: coarse N = {coarse} does not divide fine N = {fine}")]
    MeshMismatch { coarse: usize, fine: usize },

    #[error("trajectory has no recorded time increments; rerun with increment recording enabled")]
    MissingIncrements,

    #[error("fixed point iteration did not converge after {iterations} iterations (residual {residual:.3e}); the query time is likely past shock formation")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
