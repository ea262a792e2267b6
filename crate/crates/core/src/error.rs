use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateMode(usize),

    #[error("kept mode set is empty")]
    EmptyModeSet,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("permanent of a {0}x{0} matrix exceeds the limit of 20")]
    PermanentTooLarge(usize),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("post-selection on {total} photons retains probability {retained:e}")]
    EmptyPostselection { total: u32, retained: f64 },

    #[error("normal matrix is singular; fit with alpha > 0")]
    SingularNormalMatrix,

    #[error("training diverged (non-finite loss) at learning rate {learning_rate}")]
    Diverged { learning_rate: f64 },

    #[error("invalid configuration at {field}: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig { field: field.to_string(), message: message.into() }
    }
}
