use thiserror::Error;

/// Errors raised by the game, simulation, synthesis and planning layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation failed for {subject}: {reason}")]
    Validation { subject: String, reason: String },

    #[error("no pure absorption from initial profile {initial:?} within {cap} stages")]
    NonConvergence { initial: Vec<usize>, cap: usize },

    #[error("planning failed: {0}")]
    Planning(String),

    #[error("problem too large for brute force: {0}")]
    Size(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
