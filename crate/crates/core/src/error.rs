use thiserror::Error;

use crate::qstate::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state violates {} invariant(s): {}", .0.len(), format_violations(.0))]
    InvalidState(Vec<Violation>),

    #[error("input is not normalized (norm {norm:.3e})")]
    NotNormalized { norm: f64 },

    #[error("state is not pure (purity {purity:.12})")]
    NotPure { purity: f64 },

    #[error("rotation is not orthogonal: max |O Oᵀ - I| = {residual:.3e}")]
    NotOrthogonal { residual: f64 },

    #[error("invalid observable basis: {0}")]
    InvalidBasis(String),

    #[error("operator-Schmidt decomposition needs equal subsystem dimensions, got {dim_a}x{dim_b}; use the witness module for rectangular states")]
    Rectangular { dim_a: usize, dim_b: usize },

    #[error("mixing parameter p = {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("unknown state name '{0}'")]
    UnknownState(String),

    #[error("missing parameter '{param}' for state '{state}'")]
    MissingParameter { state: String, param: &'static str },

    #[error("invalid scan parameters: {0}")]
    InvalidScan(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
