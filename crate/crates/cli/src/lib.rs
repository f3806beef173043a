//! Command-line front end for `fracrd`: config parsing, the four commands and
//! the output writers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {msg}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Solver(#[from] fracrd::Error),

    #[error("oracle thresholds exceeded: {0}")]
    OracleBreach(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 success, 1 config or usage, 2 runtime failure, 3 oracle breach.
    pub fn exit_code(&self) -> i32 {
        use fracrd::Error as E;
        match self {
            CliError::Config { .. }
            | CliError::Usage(_)
            | CliError::Io { .. }
            | CliError::Csv(_) => 1,
            CliError::OracleBreach(_) => 3,
            CliError::Solver(e) => match e {
                E::InvalidGrid(_)
                | E::ShapeMismatch { .. }
                | E::AlphaOutOfRange { .. }
                | E::InvalidParameter { .. }
                | E::UnsupportedBoundary { .. }
                | E::Schedule(_) => 1,
                _ => 2,
            },
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
