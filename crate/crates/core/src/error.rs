use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is out of range or non-finite.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    #[error("unknown scenario `{name}` (valid presets: {valid})")]
    UnknownScenario { name: String, valid: String },

    #[error("config [{section}] {key}: {reason}")]
    Config {
        section: String,
        key: String,
        reason: String,
    },

    #[error("grid: {0}")]
    Grid(String),

    #[error("refusing to step: explicit scheme is unstable ({0})")]
    Unstable(String),

    #[error("numerical blow-up at step {step}: non-finite value at node (i={i}, j={j})")]
    BlowUp { step: u64, i: usize, j: usize },

    #[error("comparison: {0}")]
    Comparison(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(section: impl Into<String>, key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            section: section.into(),
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 config/parameter error, 3 stability refusal, 4 numerical blow-up,
    /// 5 I/O failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. }
            | Error::UnknownScenario { .. }
            | Error::Config { .. }
            | Error::Grid(_)
            | Error::Comparison(_) => 2,
            Error::Unstable(_) => 3,
            Error::BlowUp { .. } => 4,
            Error::Io(_) => 5,
        }
    }
}
