use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid class parameters: {0}")]
    InvalidClass(String),
    #[error("element {element} out of range for universe of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("tuple {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),
    #[error("invalid index selection: {0}")]
    InvalidSelection(String),
    #[error("not a member of the class: {0}")]
    NotMember(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("exhaustive mode needs {needed} colorings, above the ceiling of {ceiling}; use randomized or counterexample-search mode")]
    ExhaustiveCeiling { needed: String, ceiling: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("support overflow: atom `{0}` is not decided by any diagram of arity at most n_max")]
    SupportOverflow(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
