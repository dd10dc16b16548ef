use thiserror::Error;

use crate::model::MomentumBranch;

pub type Result<T> = std::result::Result<T, QrsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("branch {branch} has no critical point (4 g_c^2 = {value})")]
    NoCriticalPoint { branch: MomentumBranch, value: f64 },

    #[error("excitation energy on branch {branch} is complex (radicand {radicand:e})")]
    ComplexEnergy { branch: MomentumBranch, radicand: f64 },

    #[error("squeeze parameter diverges on branch {branch} at g = {g}")]
    Divergent { branch: MomentumBranch, g: f64 },

    #[error("g = {g} is below the critical coupling {g_c} of branch {branch}")]
    BelowCritical {
        branch: MomentumBranch,
        g: f64,
        g_c: f64,
    },

    #[error("scaling window leaves the phase: {0}")]
    InsufficientWindow(String),

    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("fidelity requested against an empty subspace")]
    EmptySubspace,

    #[error("outside the domain: {0}")]
    DomainError(String),

    #[error("root not found: {0}")]
    NoRoot(String),

    #[error("consistency check failed: {}", .0.join("; "))]
    Mismatch(Vec<String>),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for QrsError {
    fn from(e: std::io::Error) -> Self {
        QrsError::Io(e.to_string())
    }
}
