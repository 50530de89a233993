//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success, 2 configuration or validation error,
//! 3 numerical non-convergence, 4 I/O error.

use std::fmt;

use wakekit::field::FieldError;
use wakekit::fsi::FsiError;
use wakekit::morph::MorphError;
use wakekit::pod::PodError;
use wakekit::synth::SynthError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Io { .. } | FieldError::MissingManifest(_) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Field(f) => f.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<PodError> for CliError {
    fn from(e: PodError) -> Self {
        match e {
            PodError::Field(f) => f.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<FsiError> for CliError {
    fn from(e: FsiError) -> Self {
        match e {
            FsiError::NonFinite { .. } | FsiError::SingularEffectiveMatrix => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<MorphError> for CliError {
    fn from(e: MorphError) -> Self {
        match e {
            MorphError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("invalid JSON config: {e}"))
    }
}
