use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("too many variables (at most {max} are supported)")]
    TooManyVariables { max: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degree constraint violated: {term} has degree {actual} > {bound}")]
    ConstraintsViolated { term: String, actual: u64, bound: u64 },

    #[error("unbounded: no degree constraint covers variable(s) {0}")]
    Unbounded(String),

    #[error("rationalization failed: {0}")]
    RationalizationFailed(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(
        "{count} bag combinations exceed the cap of {cap}; pass a smaller tree decomposition subset"
    )]
    TooManyCombinations { count: u128, cap: u128 },
}
