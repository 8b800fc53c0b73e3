use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("position {position}: empty character set")]
    EmptyPosition { position: usize },
    #[error("position {position}: `{token}` is not an integer")]
    BadToken { position: usize, token: String },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("pattern length {pattern} exceeds text length {text}")]
    PatternTooLong { pattern: usize, text: usize },
    #[error("position {position} is indeterminate, a determinate string is required")]
    NotDeterminate { position: usize },
    #[error("enumeration needs {needed} assignments, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("literal {literal} out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: i64, num_vars: u32 },
    #[error("empty clause")]
    EmptyClause,
    #[error("clause {clause} has {width} literals, 2SAT accepts at most 2")]
    ClauseTooWide { clause: usize, width: usize },
    #[error("DPLL decision budget of {0} exhausted")]
    DecisionBudget(u64),
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },

    #[error("decoding failed at position {position}: {message}")]
    Decode { position: usize, message: String },
    #[error("position {position} is indeterminate in both strings")]
    AlternationViolated { position: usize },

    #[error("clause {clause}: {message}")]
    BadClause { clause: usize, message: String },
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("valuation does not satisfy clause {clause}")]
    UnsatisfiedClause { clause: usize },

    #[error("string of length {0} has no adjacent pairs to encode")]
    TooShortToEncode(usize),
    #[error("method {method} cannot handle this instance: {reason}")]
    MethodShape {
        method: &'static str,
        reason: String,
    },
}
