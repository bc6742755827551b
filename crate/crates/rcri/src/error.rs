use thiserror::Error;

/// Crate-wide error type.
///
/// `exit_class` groups variants the way the CLI maps them to exit codes:
/// input problems (bad flags, malformed files, invalid parameters) versus
/// numeric problems (divergent integrals, domain violations).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("no closed form for {family}: {hint}")]
    NoClosedForm { family: String, hint: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Input,
    Numeric,
}

impl Error {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::Io(_) | Error::Csv(_) => {
                ExitClass::Input
            }
            Error::Domain(_) | Error::DivergentIntegral(_) | Error::NoClosedForm { .. } => {
                ExitClass::Numeric
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
