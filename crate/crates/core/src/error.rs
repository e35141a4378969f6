use std::fmt;

use thiserror::Error;

use crate::universe::EntityHandle;

/// Byte range into a formula source line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown entity handle {0}")]
    UnknownHandle(EntityHandle),
    #[error("unknown entity id `{0}`")]
    UnknownId(String),
    #[error("`{0}` is not a quasi-set")]
    NotAQSet(String),
    #[error("extensional equality is not applicable to m-atom `{0}`")]
    NotApplicable(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource bound exceeded: {what} (limit {limit})")]
    Resource { what: String, limit: u64 },
    #[error("lexical error at {span}: unexpected character `{found}`")]
    Lex { span: Span, found: char },
    #[error("syntax error at {span}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        span: Span,
        expected: Vec<String>,
        found: String,
    },
    #[error("sort error at {span}: {message}")]
    Sort { span: Span, message: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by a configured size bound rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            Error::Lex { span, .. } | Error::Syntax { span, .. } | Error::Sort { span, .. } => {
                Some(*span)
            }
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
