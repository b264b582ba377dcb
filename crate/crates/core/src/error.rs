//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state construction, quadrature, functional evaluation
/// and the eigenvalue solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Momentum point too close to the vortex line along the reference axis,
    /// where the Berry connection is singular.
    #[error("momentum point within {margin:.3e} of the vortex line (|n x k| = {cross:.3e})")]
    VortexLine { cross: f64, margin: f64 },

    /// Quantum numbers that the angular/radial equations do not admit.
    #[error("forbidden quantum numbers: {0}")]
    ForbiddenQuantumNumbers(String),

    /// The integrand fails the boundedness check near the vortex line;
    /// the position dispersion diverges for such states (s states).
    #[error("divergent functional: state does not vanish fast enough on the vortex line (theta-scaling exponent {exponent:.3})")]
    DivergentState { exponent: f64 },

    /// Finite-difference step produced an unreliable derivative estimate.
    #[error("finite-difference step too large: truncation estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    StepTooLarge { estimate: f64, tolerance: f64 },

    /// Series or recursion exceeded the representable range.
    #[error("overflow in {0}")]
    Overflow(String),

    /// Root bracketing failed in the shooting solver.
    #[error("no sign change of the matching function in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Adaptive integrator could not meet its tolerance.
    #[error("stiff integration failure: {0}")]
    StiffIntegration(String),

    /// Derivative-free minimization did not converge.
    #[error("optimizer did not converge within {max_evals} evaluations")]
    NoConvergence { max_evals: usize },

    /// Requested evaluation point lies outside a sampled grid.
    #[error("point outside sampled grid: {0}")]
    OutOfGrid(String),

    /// Family does not provide the requested derivative information.
    #[error("state family does not support differentiation: {0}")]
    NonDifferentiable(String),

    /// Malformed state-description file.
    #[error("invalid state description: {0}")]
    InvalidState(String),

    /// Quadrature order outside the supported range.
    #[error("invalid quadrature order: {0}")]
    InvalidOrder(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
