use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Core(#[from] ergotile::Error),
}

impl CliError {
    /// Core validation errors, located by field and point where possible.
    pub fn from_core(e: ergotile::Error) -> Self {
        use ergotile::Error as E;
        match e {
            E::StepOutOfRange { point, .. } => CliError::Invalid {
                location: format!("step[{point}]"),
                message: e.to_string(),
            },
            E::NonPositive { field, point, .. } => CliError::Invalid {
                location: format!("{field}[{point}]"),
                message: e.to_string(),
            },
            E::LengthMismatch { field, .. } => CliError::Invalid {
                location: field.to_string(),
                message: e.to_string(),
            },
            E::EmptySystem => CliError::Invalid {
                location: "step".into(),
                message: e.to_string(),
            },
            E::NegativeMass { point } => CliError::Invalid {
                location: format!("measure[{point}]"),
                message: e.to_string(),
            },
            other => CliError::Core(other),
        }
    }
}
