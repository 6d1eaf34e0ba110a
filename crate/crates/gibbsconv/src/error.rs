use thiserror::Error;

/// Errors produced by construction, iteration, and optimization routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input data: bad lengths, out-of-range parameters, non-finite values.
    #[error("validation error: {0}")]
    Validation(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence after {iters} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    Convergence { iters: usize, residual: f64, tol: f64 },

    /// A computation would exceed a hard resource guard.
    #[error("resource guard exceeded: {0}")]
    Resource(String),

    /// An optimization run diverged or produced non-finite values.
    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
