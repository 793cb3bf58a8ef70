//! CLI error type carrying the process exit code.

use inar_core::bench::BenchError;
use inar_core::calibration::CalibrationError;
use inar_core::features::FeatureError;
use inar_core::formats::FormatError;
use inar_core::pool::PoolError;
use inar_core::router::RouteError;
use inar_core::sim::SimError;
use inar_core::strategies::StrategyError;

/// Exit code 1 for validation failures, 2 for I/O failures.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self { message, exit_code: 1 }
    }

    pub fn io(message: String) -> Self {
        Self { message, exit_code: 2 }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(io) => CliError::io(io.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<PoolError> for CliError {
    fn from(e: PoolError) -> Self {
        match e {
            PoolError::Io(io) => CliError::io(io.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Format(f) => f.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::validation(e.to_string())
            }
        })*
    };
}

validation_from!(FeatureError, RouteError, CalibrationError, SimError, StrategyError);
