use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("denominator vanishes at the specialization point")]
    DenominatorVanishes,

    #[error("zero input where a nonzero element is required")]
    ZeroInput,

    #[error("exact division failed")]
    InexactDivision,

    #[error("operands live over different variable sets or systems")]
    Incompatible,

    #[error("rectangular system is not integrable: derivations do not commute on {0}")]
    NotIntegrable(String),

    #[error("degree ceiling {0} exceeded without finding an annihilator")]
    DegreeCeiling(u32),

    #[error("search bound {0} exhausted; result inconclusive")]
    BoundExhausted(u32),

    #[error("no nonsingular evaluation point found on the search grid")]
    NoNonsingularPoint,

    #[error("factorization hint rejected: {0}")]
    BadHint(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(String),
}
