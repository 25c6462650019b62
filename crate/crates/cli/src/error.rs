use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Table(#[from] crate::table::TableError),

    #[error("{0}")]
    Accuracy(String),

    #[error("{0}")]
    Truncation(String),

    #[error("{0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) | CliError::Table(_) => 2,
            CliError::Accuracy(_) => 3,
            CliError::Truncation(_) => 4,
            CliError::Domain(_) => 5,
        }
    }
}

impl From<rotorlab::Error> for CliError {
    fn from(err: rotorlab::Error) -> Self {
        use rotorlab::Error;
        match err {
            Error::Accuracy(_) => CliError::Accuracy(err.to_string()),
            Error::Truncation { .. } => CliError::Truncation(format!(
                "{err} (set rotor.n_max larger than the sizing rule, or reduce run.n_kicks)"
            )),
            Error::Domain(_) | Error::Grid { .. } => CliError::Domain(err.to_string()),
        }
    }
}
