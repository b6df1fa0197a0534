use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration, parameters or input documents. Exit status 1.
    Validation,
    /// A stage failed while processing valid inputs. Exit status 2.
    Runtime,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Runtime => 2,
        }
    }
}

/// An error tagged with the pipeline stage it came from.
#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub stage: String,
    pub source: anyhow::Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:#}", self.stage, self.source)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

pub trait Tagged<T> {
    fn validation(self, stage: &str) -> CliResult<T>;
    fn runtime(self, stage: &str) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Tagged<T> for Result<T, E> {
    fn validation(self, stage: &str) -> CliResult<T> {
        self.map_err(|e| CliError { kind: ErrorKind::Validation, stage: stage.to_string(), source: e.into() })
    }

    fn runtime(self, stage: &str) -> CliResult<T> {
        self.map_err(|e| CliError { kind: ErrorKind::Runtime, stage: stage.to_string(), source: e.into() })
    }
}

pub fn invalid(stage: &str, message: impl fmt::Display) -> CliError {
    CliError { kind: ErrorKind::Validation, stage: stage.to_string(), source: anyhow::anyhow!("{message}") }
}
