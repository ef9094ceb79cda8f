use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Input {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("window {index} (ending {date}): {source}")]
    Window {
        index: usize,
        date: String,
        source: nlcorr::Error,
    },

    #[error(transparent)]
    Core(#[from] nlcorr::Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => EXIT_USAGE,
            CliError::Window { source, .. } | CliError::Core(source) => core_code(source),
            CliError::Output { .. } => EXIT_VALIDATION,
        }
    }

    pub(crate) fn in_window(index: usize, date: &str) -> impl FnOnce(nlcorr::Error) -> Self + '_ {
        move |source| CliError::Window {
            index,
            date: date.to_string(),
            source,
        }
    }
}

fn core_code(e: &nlcorr::Error) -> i32 {
    match e {
        nlcorr::Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
