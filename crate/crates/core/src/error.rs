use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value violates a structural invariant (bad arity, index out of range, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An enumeration or search would exceed its configured bound.
    #[error("resource bound exceeded: {what} needs {required}, bound is {bound}")]
    BoundExceeded {
        what: &'static str,
        required: u128,
        bound: u128,
    },

    /// A caller-side precondition did not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    /// The structured algorithm cannot be applied to this input.
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
