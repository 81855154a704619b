use wallcross_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Toml(String),
    #[error("config field `{field}`: {msg}")]
    Schema { field: String, msg: String },
    #[error("no command given on the command line or in the config")]
    NoCommand,
    #[error("thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for anything wrong with the input, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Toml(_) | CliError::Schema { .. } | CliError::NoCommand | CliError::Threads(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidData(_)
                | CoreError::InputTooLarge { .. }
                | CoreError::NotFullDimensional(_)
                | CoreError::NotProper(_)
                | CoreError::CrepantWall
                | CoreError::LabelingError(_)
                | CoreError::BasisSearchFailed { .. }
                | CoreError::BasisRejected(_)
                | CoreError::SectorNotInFan(_)
                | CoreError::SpanFailure(_)
                | CoreError::TagMismatch(_)
                | CoreError::NonIntegralPairing { .. } => 2,
                _ => 3,
            },
        }
    }
}
