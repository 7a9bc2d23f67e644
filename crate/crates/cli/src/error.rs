use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Capacity(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Capacity(_) => "capacity",
            CliError::Runtime(_) => "runtime",
        }
    }
}

impl From<dupnet_core::Error> for CliError {
    fn from(e: dupnet_core::Error) -> Self {
        use dupnet_core::Error as E;
        match e {
            E::Capacity { .. } => CliError::Capacity(e.to_string()),
            E::InvalidParameter(_) | E::InvalidArgument(_) | E::Boundary(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv output: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        let capacity: CliError = dupnet_core::Error::Capacity {
            what: "exact",
            size: 70,
            limit: 64,
        }
        .into();
        assert_eq!(capacity.exit_code(), 3);
        let bad: CliError = dupnet_core::Error::InvalidParameter("p".into()).into();
        assert_eq!((bad.exit_code(), bad.kind()), (1, "usage"));
        let missing = CliError::io(Path::new("nope.txt"), io::Error::from(io::ErrorKind::NotFound));
        assert_eq!(missing.exit_code(), 2);
        assert!(missing.to_string().starts_with("nope.txt"));
    }
}
