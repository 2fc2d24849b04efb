use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    ConfigFile { path: PathBuf, msg: String },
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failure at step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: chimhd_core::Error,
    },
    #[error("invariant breach at step {step}: {msg}")]
    Invariant { step: usize, msg: String },
}

impl CliError {
    /// 1 config, 2 solver, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigFile { .. } | CliError::Config { .. } | CliError::Invalid(_) => 1,
            CliError::Io { .. } | CliError::Solver { .. } => 2,
            CliError::Invariant { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
