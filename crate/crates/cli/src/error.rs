use thiserror::Error;

/// Exit code for a semantic failure (invalid state, not extreme, no convergence).
pub const EXIT_FAIL: u8 = 1;
/// Exit code for I/O, parse and usage errors.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: parse error at byte {offset} (field `{field}`): {message}")]
    Parse {
        path: String,
        field: String,
        offset: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qmarg::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use qmarg::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::Core(
                E::IndexOutOfRange { .. }
                | E::DimensionMismatch(_)
                | E::NonFinite
                | E::EmptyKraus
                | E::InvalidArgument(_),
            ) => EXIT_INPUT,
            CliError::Core(_) => EXIT_FAIL,
        }
    }
}
