use thiserror::Error;

/// Solver error type. Numeric payloads are stored as `f64` regardless of the
/// working scalar type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive step size fell below the representable minimum. Carries the
    /// last accepted state as `(r, u, du, v, dv)`.
    #[error("integration stalled at r = {r} (step underflow)")]
    IntegrationStalled { r: f64, state: [f64; 4] },

    #[error("bracket search failed: no initial value classified as increasing up to 2^60")]
    BracketFailure,

    #[error("bisection did not converge: best bracket [{lo}, {hi}] after {iterations} iterations")]
    NonConvergence { lo: f64, hi: f64, iterations: usize },

    /// Horizon reached with `u` still above the decay-acceptance threshold.
    #[error("classification undetermined at r = {r} (u = {u}): increase r_max")]
    Undetermined { r: f64, u: f64 },

    #[error("radial Poisson solve did not converge: {0}")]
    PoissonNonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
