use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not admissible: {0}")]
    Inadmissible(String),

    #[error("matrix shape error: {0}")]
    Shape(String),

    #[error("element does not belong to the group: {0}")]
    GroupMismatch(String),

    #[error("unsupported: infinite group (free rank {free_rank})")]
    UnsupportedInfinite { free_rank: usize },

    #[error("group of order {order} exceeds cap {cap}")]
    GroupTooLarge { order: String, cap: u64 },

    #[error("permutation group closure exceeds cap {cap}")]
    ClosureTooLarge { cap: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid clopen set: {0}")]
    InvalidClopen(String),

    #[error("invalid element: {}", .0.join("; "))]
    InvalidElement(Vec<String>),

    #[error("graph or restriction mismatch")]
    RestrictionMismatch,

    #[error("point lies outside the restriction")]
    PointOutside,

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("realization search exhausted at bound {bound}")]
    SearchExhausted { bound: usize },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors that mean "refused to compute" rather than "bad input".
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedInfinite { .. }
                | Error::GroupTooLarge { .. }
                | Error::ClosureTooLarge { .. }
                | Error::SearchExhausted { .. }
        )
    }
}
