use std::fmt;

/// CLI failure, tagged by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files or input data.
    Config(String),
    /// The numerics rejected the request: inadmissible factors, failed verification, ...
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Numeric(m) => write!(f, "numerical error: {m}"),
            Self::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cpfif::Error> for CliError {
    fn from(e: cpfif::Error) -> Self {
        match e {
            cpfif::Error::InvalidInput(_) => Self::Config(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}
