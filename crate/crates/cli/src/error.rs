use std::path::PathBuf;

/// Process exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for failures while running an experiment.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid manifest or config; `pointer` locates the offending value.
    #[error("config error at {pointer:?}: {message}")]
    Config { pointer: String, message: String },

    #[error("experiment failed: {0}")]
    Experiment(qrp_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("plot data: {0}")]
    Plot(String),

    #[error("malformed results file {}: {message}", path.display())]
    Results { path: PathBuf, message: String },
}

impl CliError {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { pointer: pointer.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Plot(_) | CliError::Results { .. } => EXIT_CONFIG,
            CliError::Experiment(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

impl From<qrp_core::Error> for CliError {
    fn from(e: qrp_core::Error) -> Self {
        match e {
            qrp_core::Error::InvalidConfig { field, message } => {
                CliError::Config { pointer: format!("/config{field}"), message }
            }
            other => CliError::Experiment(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
