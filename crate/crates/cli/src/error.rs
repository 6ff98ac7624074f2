use kml_core::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Csv(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::NotPositiveDefinite(_)
                | Error::EigenNoConvergence { .. }
                | Error::TopologyMismatch { .. }
                | Error::SingularForm { .. }
                | Error::NonPositiveConstant(_)
                | Error::IntegerOverflow
                | Error::NoInteriorDofs => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            },
        }
    }
}
