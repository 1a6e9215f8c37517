use thiserror::Error;

/// Errors produced by the interpolation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Structurally bad input: too few points, unsorted abscissae, NaN, length mismatch.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A query point outside `[x_1, x_M]`.
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    /// A scaling factor violates the admissibility condition of the requested construction.
    #[error("scaling factor λ[{index}] = {value} violates |λ| < {limit} ({condition})")]
    Inadmissible {
        index: usize,
        value: f64,
        limit: f64,
        condition: &'static str,
    },

    /// Build-time verification that the attractor passes through the data failed.
    #[error("knot verification failed: max |F(x_t) - u_t| = {max_residual:e} at t = {index}")]
    KnotMismatch { index: usize, max_residual: f64 },

    /// Attractor refinement would exceed the configured point cap.
    #[error("refinement to depth {depth} needs {needed} points, cap is {cap}")]
    ResourceExhausted { depth: usize, needed: u128, cap: usize },

    /// A fixed-point iteration failed to reach its tolerance within the iteration budget.
    #[error("fixed-point iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
