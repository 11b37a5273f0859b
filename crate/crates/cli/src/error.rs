use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("scenario is not valid JSON: {0}")]
    Json(String),

    #[error("invalid scenario: {0}")]
    Schema(String),

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error(transparent)]
    Engine(#[from] fockline::Error),

    #[error("probability {value} in `{table}` lies outside [0, 1 + 1e-10]")]
    Probability { table: String, value: f64 },

    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
