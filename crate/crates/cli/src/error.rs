use std::path::PathBuf;

use locfaults_core::frontend::FrontendError;
use locfaults_core::input::InputError;
use locfaults_core::locfaults::LocalizeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Frontend { path: PathBuf, source: FrontendError },
    #[error("invalid counterexample: {0}")]
    Counterexample(String),
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("no counterexample found within {0} candidate inputs")]
    NoCounterexample(usize),
    #[error("{0}")]
    Localize(#[from] LocalizeError),
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{run}: golden mismatch at {what}\n  expected: {expected}\n  actual:   {actual}")]
    GoldenMismatch { run: String, what: String, expected: String, actual: String },
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Stable identifier printed as `error[code]`.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Frontend { source, .. } => source.code(),
            CliError::Counterexample(_) => "counterexample-syntax",
            CliError::Input(_) => "counterexample-shape",
            CliError::NoCounterexample(_) => "no-counterexample",
            CliError::Localize(e) => match e {
                LocalizeError::NotACounterexample => "not-a-counterexample",
                LocalizeError::PreconditionViolated => "precondition-violated",
                LocalizeError::Cfg(_) => "cfg",
                LocalizeError::Path(_) => "path",
                LocalizeError::Mcs(_) => "mcs",
                LocalizeError::TooLarge(_) => "too-large",
            },
            CliError::Manifest { .. } => "manifest",
            CliError::GoldenMismatch { .. } => "golden-mismatch",
            CliError::Json(_) => "json",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Localize(LocalizeError::NotACounterexample) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
