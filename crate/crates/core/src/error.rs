use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation received an argument that violates its documented
    /// precondition (non-Hermitian input, bad level index, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Matrix or vector dimensions are incompatible with the operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Invalid model or run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A dense solve finished but its result failed the residual check.
    #[error("numerical failure: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    /// A state or operator does not fit in the requested Fock truncation.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Energy levels did not stabilise under cutoff doubling before the cap.
    #[error("no convergence at n_fock = {n_fock}: level {level} moved from {previous} to {current}")]
    Convergence {
        n_fock: usize,
        level: usize,
        previous: f64,
        current: f64,
    },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// Requested a level outside the converged part of a spectrum.
    #[error("level {level} is not converged (only {converged} levels are)")]
    UnconvergedLevel { level: usize, converged: usize },

    #[error("resonant denominator: {0}")]
    Resonance(String),

    /// Dispersive ladder of the readout mode could not be identified.
    #[error("level identification failed: {0}")]
    Extraction(String),

    /// The time stepper failed its step-halving check.
    #[error("time step did not converge: fidelity change {change:e} after {steps} steps")]
    StepSize { steps: usize, change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
