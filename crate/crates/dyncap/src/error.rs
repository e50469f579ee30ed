use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything the CLI can fail with, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dyncap_core::Error),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 1 for bad input, 2 for an invariant violated mid-computation, 3 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Format { .. } => 1,
            CliError::Core(e) if e.is_invariant_violation() => 2,
            CliError::Core(_) => 1,
            CliError::Io { .. } => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyncap_core::Error;

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::usage("x").exit_code(), 1);
        assert_eq!(CliError::Core(Error::NotConverged { sweeps: 100 }).exit_code(), 2);
        assert_eq!(CliError::Core(Error::NotUnitTrace { trace: 0.5 }).exit_code(), 2);
        assert_eq!(CliError::Core(Error::DimensionCap { dim: 9, cap: 4 }).exit_code(), 1);
        let io = CliError::Io {
            path: "x".into(),
            source: io::Error::other("disk"),
        };
        assert_eq!(io.exit_code(), 3);
    }
}
