use thiserror::Error;

/// Errors raised by model construction and the analysis stages.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// which the command-line front end prints next to the message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid token {0:?}")]
    InvalidToken(String),
    #[error("invalid time {0:?}: {1}")]
    InvalidTime(String, &'static str),
    #[error("interval end {end} precedes start {start}")]
    InvertedInterval { start: String, end: String },
    #[error("invalid object reference {0:?}: {1}")]
    InvalidObject(String, &'static str),
    #[error("invalid {field} value {value:?}")]
    InvalidValue { field: &'static str, value: String },
    #[error("duplicate unit id {0:?}")]
    DuplicateUnit(String),
    #[error("actor {0:?} is not in the corpus roster")]
    UnknownActor(String),
    #[error("corpus contains no units")]
    EmptyCorpus,
    #[error("unit {0:?} does not resolve in the corpus")]
    UnknownUnit(String),
    #[error("episode is not disaligned (label {0})")]
    NotDisaligned(String),
    #[error("malformed pattern: {0}")]
    Pattern(String),
    #[error("corpus contains no verbal units")]
    NoVerbal,
    #[error("invalid synthesis spec: {0}")]
    Spec(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidToken(_) | Error::InvalidValue { .. } => "E_VALUE",
            Error::InvalidTime(..) | Error::InvertedInterval { .. } => "E_TIME",
            Error::InvalidObject(..) => "E_OBJECT",
            Error::DuplicateUnit(_) => "E_DUPID",
            Error::UnknownActor(_) => "E_ACTOR",
            Error::EmptyCorpus => "E_EMPTY",
            Error::UnknownUnit(_) => "E_UNKNOWN_UNIT",
            Error::NotDisaligned(_) => "E_NOT_DISALIGNED",
            Error::Pattern(_) => "E_PATTERN",
            Error::NoVerbal => "E_NO_VERBAL",
            Error::Spec(_) => "E_SPEC",
            Error::Config(_) => "E_CONFIG",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
