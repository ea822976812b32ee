use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants fall into three families that the command line maps onto exit
/// statuses: mathematical rejections, resource exhaustion, and malformed
/// input. See [`Error::is_resource_limit`] and [`Error::is_input_error`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image of beta does not have finite index in its target (rank {rank} < {target_rank})")]
    NotFiniteIndex { rank: usize, target_rank: usize },

    #[error("fan is not smooth")]
    NotSmooth,

    #[error("fan is not complete")]
    NotComplete,

    #[error("fan must be smooth and complete")]
    NotCompleteOrSmooth,

    #[error("no ordering of the maximal cones satisfies the shelling conditions (fan may be non-projective)")]
    NoOrderFound,

    #[error("step budget of {budget} reductions exceeded")]
    ResourceLimit { budget: u64 },

    #[error("computation cancelled")]
    Cancelled,

    #[error("unsupported module: {0}")]
    UnsupportedModule(String),

    #[error("basis check failed: {0}")]
    BasisCheckFailed(String),

    #[error("expected {expected} designated units, got {got}")]
    UnitArityMismatch { expected: usize, got: usize },

    #[error("malformed relation: {0}")]
    MalformedRelation(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. } | Error::Cancelled)
    }

    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::ArityMismatch { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
