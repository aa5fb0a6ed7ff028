use std::process::ExitCode;

use blinkmorse_core::codec::CodecError;
use blinkmorse_core::engine::EngineError;
use blinkmorse_core::io::{IoError, SimError};
use blinkmorse_core::session::SessionError;
use blinkmorse_core::signal::SignalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    /// Nothing to work with: empty calibration, empty study, poor calibration.
    #[error("{0}")]
    Insufficient(String),
    #[error("{0}")]
    Protocol(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Io { .. } => 1,
            Self::Insufficient(_) => 2,
            Self::Protocol(_) => 3,
            Self::Usage(_) => 4,
        })
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io(e) => Self::io("read failed", e),
            IoError::Protocol(p) => Self::Protocol(p.to_string()),
        }
    }
}

impl From<SignalError> for CliError {
    fn from(e: SignalError) -> Self {
        match e {
            SignalError::EmptyCalibration => Self::Insufficient(e.to_string()),
            SignalError::InvalidConfig(_) => Self::Usage(e.to_string()),
            _ => Self::Protocol(e.to_string()),
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::NonMonotonicTimestamp { .. } => Self::Protocol(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Signal(e) => e.into(),
            EngineError::Codec(e) => e.into(),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Codec(e) => e.into(),
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::IoFailure(io) => Self::io("session file", io),
            SessionError::EmptyStudy => Self::Insufficient(e.to_string()),
            SessionError::MalformedCsv { .. } => Self::Protocol(e.to_string()),
            SessionError::NegativeDuration { .. } => Self::Protocol(e.to_string()),
        }
    }
}
