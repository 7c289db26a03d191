use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by chain construction, the deciders and the harness.
///
/// Numeric payloads are widened to `f64` so the error type does not depend on
/// the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown state label `{0}`")]
    UnknownState(String),
    #[error("state id {id} out of range for a space of {len} states")]
    IndexOutOfRange { id: usize, len: usize },
    #[error("negative or non-finite probability {value} on transition {from} -> {to}")]
    InvalidProbability { from: usize, to: usize, value: f64 },
    #[error("row {row} is not stochastic (sums to {sum})")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("state spaces differ ({left} vs {right} states)")]
    SpaceMismatch { left: usize, right: usize },
    #[error("linear solve failed (residual {residual})")]
    NumericalFailure { residual: f64 },
    #[error("measure is not invariant (residual {residual})")]
    NotInvariant { residual: f64 },
    #[error("set is not invariant: state {state} leaks mass {leak}")]
    NotInvariantSet { state: usize, leak: f64 },
    #[error("kernel is not irreducible")]
    NotIrreducible,
    #[error("no small set found with m <= {m_max}")]
    SearchExhausted { m_max: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("combined support of {size} states exceeds the LP limit of {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("transportation LP reported infeasible marginals")]
    LpInfeasible,
    #[error("middle marginals disagree at {index}: {left} vs {right}")]
    MarginalMismatch { index: usize, left: f64, right: f64 },
    #[error("skeleton transition ({from_x},{from_y}) -> ({to_x},{to_y}) is not supported")]
    UnsupportedEndpoint {
        from_x: usize,
        from_y: usize,
        to_x: usize,
        to_y: usize,
    },
    #[error("generator parameters not realizable: {0}")]
    UnrealizableParams(String),
    #[error("fixture `{name}` needs truncation >= {min}, got {truncation}")]
    TruncationTooSmall {
        name: String,
        truncation: usize,
        min: usize,
    },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("equivalence audit found {count} violation(s):\n{summary}")]
    AuditViolation { count: usize, summary: String },
}
