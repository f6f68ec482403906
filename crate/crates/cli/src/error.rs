use std::fmt::Display;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error(transparent)]
    Numerical(#[from] rotwave::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(pointer: &str, message: impl Display) -> Self {
        Self::Config {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }

    pub fn io(path: impl Display, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => exit::CONFIG,
            Self::Numerical(_) | Self::Io { .. } => exit::NUMERICAL,
        }
    }
}

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const NO_BIFURCATION: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}
