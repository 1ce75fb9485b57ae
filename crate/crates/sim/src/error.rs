use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const VALIDATION: u8 = 4;
    pub const MODEL: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{}: parse error{}: {message}", path.display(), location(*line, *column))]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("{} validation issue(s), first: {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    Validation(Vec<hts_core::Error>),
    #[error("experiment `{experiment}` needs the [simulation.{section}] section")]
    MissingSection { experiment: &'static str, section: &'static str },
    #[error("{}", model_message(.0))]
    Model(#[from] hts_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

// Most model messages already start with their module name.
fn model_message(e: &hts_core::Error) -> String {
    let text = e.to_string();
    if text.starts_with(e.module()) {
        text
    } else {
        format!("{}: {text}", e.module())
    }
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl SimError {
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Parse { .. } => exit::PARSE,
            SimError::Validation(_) | SimError::MissingSection { .. } => exit::VALIDATION,
            SimError::Model(_) => exit::MODEL,
            SimError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: Option<usize>, message: impl Into<String>) -> Self {
        SimError::Parse {
            path: path.into(),
            line,
            column: None,
            message: message.into(),
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
