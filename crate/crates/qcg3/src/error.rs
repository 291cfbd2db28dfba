use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("q-factorial of negative argument {0}")]
    NegativeFactorial(i64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lowering sequence annihilates the state at step {step} (root alpha_{root}, power {power})")]
    InvalidPath { step: usize, root: u8, power: u32 },

    #[error("candidate states are numerically linearly dependent (residual norm^2 {residual})")]
    LinearDependence { residual: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
