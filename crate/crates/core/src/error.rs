use std::fmt;

/// What went wrong on a particular line of a structure document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    UnknownSymbol(String),
    UnknownElement(String),
    DuplicateElement(String),
    DuplicateSymbol(String),
    EmptyUniverse(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::ArityMismatch {
                symbol,
                expected,
                found,
            } => write!(
                f,
                "symbol `{symbol}` has arity {expected} but {found} arguments were given"
            ),
            ParseErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            ParseErrorKind::UnknownElement(e) => write!(f, "unknown element `{e}`"),
            ParseErrorKind::DuplicateElement(e) => write!(f, "element `{e}` declared twice"),
            ParseErrorKind::DuplicateSymbol(s) => write!(f, "symbol `{s}` declared twice"),
            ParseErrorKind::EmptyUniverse(name) => {
                write!(f, "structure `{name}` has an empty universe")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sizes differ, so the system is infeasible: {0}")]
    InfeasibleBySize(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("counter overflow: {0}")]
    Overflow(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
