use thiserror::Error;

use crate::config::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration:\n{}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("pulse envelope does not fit in the grid box: {0}")]
    EnvelopeTooWide(String),

    #[error("non-finite amplitude in channel {channel} at grid index {index} (t = {t_ns} ns)")]
    NonFinite {
        channel: usize,
        index: usize,
        t_ns: f64,
    },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  {}: {}", v.field, v.message))
        .collect::<Vec<_>>()
        .join("\n")
}
