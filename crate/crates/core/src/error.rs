use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} mode labels, found {found}")]
    MismatchedModeCount { expected: usize, found: usize },

    #[error("state has no terms")]
    EmptyState,

    #[error("coherent label is not finite: {0}")]
    NonFiniteLabel(String),

    #[error("state is near-singular (squared norm {norm_sqr:e} below {threshold:e})")]
    NearSingularState { norm_sqr: f64, threshold: f64 },

    #[error("mode index {mode} out of range for a {modes}-mode state")]
    BadModeIndex { mode: usize, modes: usize },

    #[error("two-mode operation needs distinct modes, got {0} twice")]
    SameMode(usize),

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("measurement enumeration reached the photon cap {cap} with cumulative mass {mass}")]
    NonConvergence { cap: usize, mass: f64 },

    #[error("cutoff too small: {retained} retained, {required} required")]
    CutoffTooSmall { retained: f64, required: f64 },

    #[error("cutoff mismatch: {0}")]
    CutoffMismatch(String),

    #[error("state has zero norm")]
    ZeroState,

    #[error("input alpha {input} differs from channel alpha {channel}")]
    AlphaMismatch { input: String, channel: String },

    #[error("input and channel layouts are incompatible: {0}")]
    ParityMismatch(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("engine cannot run this protocol: {0}")]
    EngineUnsupported(String),

    #[error("engines disagree: {0}")]
    EngineDisagreement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NearSingularState { .. }
                | Error::NonConvergence { .. }
                | Error::CutoffTooSmall { .. }
                | Error::ZeroState
                | Error::EngineDisagreement(_)
        )
    }
}
