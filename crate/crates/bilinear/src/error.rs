use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("invalid field specification: {0}")]
    InvalidFieldSpec(String),
    #[error("parse error at position {pos}: expected {expected}")]
    Parse { pos: usize, expected: String },
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("operation requires an infinite field")]
    FiniteField,
    #[error("operands live in different ambient spaces")]
    AmbientMismatch,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("solution set is inconsistent")]
    Inconsistent,
    #[error("gram matrix violates the flavor at entry pair ({row}, {col})")]
    FlavorViolation { row: usize, col: usize },
    #[error("spaces have different flavors")]
    FlavorMismatch,
    #[error("map is not a bilinear monomorphism: {0}")]
    NotMonomorphism(String),
    #[error("non-degenerate closure exceeded its dimension budget")]
    ClosureBudgetExceeded,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("input diagram does not commute: {0}")]
    DiagramNotCommuting(String),
    #[error("required independence does not hold: {0}")]
    IndependenceViolated(String),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("regular formula contains a linear equation")]
    ContainsLinearEquation,
    #[error("tuples have different quantifier-free types")]
    TypeMismatch,
    #[error("randomized search exhausted its retry budget")]
    SearchExhausted,
    #[error("no value assigned to variable `{0}`")]
    UnboundVariable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
