use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations; mathematical outcomes that are not failures (e.g. an
/// obstructed prolongation) are ordinary return values, not errors.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("operands belong to different fields: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("index {index} outside valid range [{lo}, {hi}]")]
    InvalidIndex { index: i64, lo: i64, hi: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("algebra has no second product")]
    NoSecondProduct,
    #[error("invalid preset parameters: {0}")]
    InvalidParams(String),
    #[error("module preset unavailable: {0}")]
    PresetUnavailable(String),
    #[error("constructed action violates {axiom} at basis triple {witness:?}")]
    AxiomViolation { axiom: String, witness: (usize, usize, usize) },
    #[error("operation requires cochain degree >= 1")]
    DegreeZero,
    #[error("cochain is valued in the wrong module: expected {expected}, got {got}")]
    WrongModule { expected: String, got: String },
    #[error("pairing violates the cup axioms at basis pair ({0}, {1})")]
    InvalidPairing(usize, usize),
    #[error("cochain is not a cocycle: {0}")]
    NotACocycle(String),
    #[error("cochain space dimension {needed} exceeds budget {budget}")]
    OutOfMemoryBudget { needed: usize, budget: usize },
    #[error("algebra does not satisfy the Novikov identity")]
    NotNovikov,
    #[error("associator of the designated element escapes the submodule at basis pair ({0}, {1})")]
    AssociatorEscapesSubmodule(usize, usize),
    #[error("deformation series is only verified up to order {verified}, need {needed}")]
    SeriesNotVerified { verified: usize, needed: usize },
    #[error("map is not a right-symmetric derivation (fails at basis pair ({0}, {1}))")]
    NotADerivation(usize, usize),
    #[error("operation requires characteristic p > 0")]
    WrongCharacteristic,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("parse error: {0}")]
    ParseError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
