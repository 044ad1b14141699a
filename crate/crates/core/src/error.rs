use thiserror::Error;

/// Faults raised by the simulator. Numeric payloads are widened to `f64`
/// so the error type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("all amplitudes are zero")]
    ZeroVector,

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("entangler defined for reference control state")]
    ControlNotReference,

    #[error("zero-probability branch {branch} (P = {probability:e})")]
    ZeroProbabilityBranch { branch: usize, probability: f64 },

    #[error("branch index {index} out of range for dimension {dim}")]
    BranchOutOfRange { index: usize, dim: usize },

    #[error("coherent vectors are defined for two-level systems only, got N = {0}")]
    NotQubit(usize),

    #[error("angle undefined for zero coherent vector")]
    ZeroCoherentVector,

    #[error("angles undefined: coherent vectors vanish")]
    VanishingCoherentVectors,

    #[error("environment dimension {env} is smaller than system dimension {system}")]
    EnvironmentTooSmall { env: usize, system: usize },

    #[error("tripartite state is not in pointer form (target {target}, control {control})")]
    NotPointerForm { target: usize, control: usize },

    #[error("target remains entangled with the environment after measurement")]
    EntangledWithEnvironment,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
