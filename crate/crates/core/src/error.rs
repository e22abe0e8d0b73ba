use alloc::string::String;

use crate::exactfield::FieldId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("field mismatch: {0:?} and {1:?}")]
    FieldMismatch(FieldId, FieldId),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not integral: {0}")]
    NotIntegral(String),
    #[error("euclidean division failed to decrease the norm in {0:?}")]
    NormNotDecreasing(FieldId),
    #[error("operation needs a quadratic field, got {0:?}")]
    NotQuadratic(FieldId),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not a unimodular matrix: determinant is {0}")]
    NotUnimodular(String),
    #[error("point is outside [0, inf]: {0}")]
    OutsideBaseInterval(String),
    #[error("matrix is not positive")]
    NotPositive,
    #[error("cornerpoints are undefined: |a'| = |c'| after normalization")]
    DegenerateCorners,
    #[error("unknown case id: {0}")]
    UnknownCase(String),
    #[error("map validation failed for {case}: {condition}")]
    InvalidMap { case: String, condition: String },
    #[error("letter {letter} outside the alphabet 1..={r}")]
    LetterOutOfRange { letter: u32, r: u32 },
    #[error("invalid block pattern: {0}")]
    Pattern(String),
    #[error("symbolic analysis failed: {0}")]
    Symbolic(String),
    #[error("sign not constant on the parameter region")]
    Undecided,
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("orbit cannot be split into blocks after position {0}")]
    Unsplittable(usize),
}
