//! Error type shared across the solver.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum GenAfError {
    /// The element's DOF functionals do not determine the reconstruction
    /// space: the generalized Vandermonde matrix is (numerically) singular.
    #[error("unisolvence failure: {0}")]
    UnisolvenceFailure(String),

    /// A state left the admissible set (Euler: rho <= 0 or p <= 0).
    #[error("inadmissible state in cell ({i}, {j}): {detail}")]
    InadmissibleState { i: usize, j: usize, detail: String },

    /// The CFL time-step bound degenerated (max signal speed is zero).
    #[error("zero signal speed: CFL time step is unbounded")]
    ZeroSignalSpeed,

    /// The dense eigensolver did not converge.
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),

    /// The solution stopped being finite during time integration.
    #[error("non-finite state at t = {t}, step {step}")]
    NonFiniteState { t: f64, step: usize },

    /// Invalid run configuration (bad order, grid, parameter combination).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl GenAfError {
    /// Stable machine-readable tag for CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            GenAfError::UnisolvenceFailure(_) => "unisolvence_failure",
            GenAfError::InadmissibleState { .. } => "inadmissible_state",
            GenAfError::ZeroSignalSpeed => "zero_signal_speed",
            GenAfError::EigensolverFailure(_) => "eigensolver_failure",
            GenAfError::NonFiniteState { .. } => "non_finite_state",
            GenAfError::InvalidConfig(_) => "invalid_config",
        }
    }
}
