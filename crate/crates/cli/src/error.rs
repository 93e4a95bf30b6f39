use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, malformed or inconsistent configuration, unreadable input.
    #[error("{0}")]
    Usage(String),

    /// A physics invariant or oracle cross-check failed.
    #[error("integrity failure: {0}")]
    Integrity(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io { .. } => 2,
            Self::Integrity(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }
}

impl From<pairdyn::Error> for CliError {
    fn from(e: pairdyn::Error) -> Self {
        use pairdyn::Error as E;
        match e {
            E::Integrity(_) | E::NoConvergence { .. } => Self::Integrity(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}
