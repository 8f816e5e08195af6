use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("row of state `{state}` sums to {sum}, expected 1")]
    NotStochastic { state: String, sum: String },

    #[error("initial distribution sums to {sum}, expected 1")]
    InitialNotDistribution { sum: String },

    #[error("probability {value} for {context} is outside [0,1]")]
    NotProbability { context: String, value: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),

    #[error("state `{0}` has no label")]
    MissingLabel(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("automaton is ambiguous (witness: {witness})")]
    Ambiguous { witness: String },

    #[error(
        "automaton admits two accepting prefixes along one trajectory (witness: {witness}); \
         the linear-system method would overcount"
    )]
    PrefixOverlap { witness: String },

    #[error("automaton is not deterministic")]
    NotDeterministic,

    #[error("wrong acceptance mode: expected {expected}")]
    WrongMode { expected: &'static str },

    #[error("chain is not functional: state `{0}` has more than one successor")]
    NotFunctional(String),

    #[error("contraction precondition violated: unknown vertex {0} cannot reach an accepting vertex")]
    ContractionViolated(String),

    #[error("uniqueness precondition violated: (I - C) is singular")]
    Singular,

    #[error("size limit exceeded: {what} has more than {limit} elements")]
    SizeAbort { what: &'static str, limit: usize },

    #[error("rejection sampling exhausted after {0} attempts")]
    RejectionCapExhausted(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::NotStochastic { .. }
            | Error::InitialNotDistribution { .. }
            | Error::NotProbability { .. }
            | Error::UnknownState(_)
            | Error::UnknownLetter(_)
            | Error::Duplicate(_)
            | Error::MissingLabel(_) => 2,
            Error::AlphabetMismatch(_)
            | Error::Ambiguous { .. }
            | Error::PrefixOverlap { .. }
            | Error::NotDeterministic
            | Error::WrongMode { .. }
            | Error::NotFunctional(_)
            | Error::ContractionViolated(_)
            | Error::RejectionCapExhausted(_)
            | Error::InvalidArgument(_) => 3,
            Error::Singular | Error::Internal(_) => 4,
            Error::SizeAbort { .. } => 5,
        }
    }
}
