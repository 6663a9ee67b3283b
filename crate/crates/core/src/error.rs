use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid neighborhood: {0}")]
    InvalidNeighborhood(String),
    #[error("expected {expected} neighbor states, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("state {state} out of range for alphabet of size {size}")]
    StateOutOfRange { state: u32, size: u32 },
    #[error("rule table has length {got}, expected {expected}")]
    TableLength { expected: u64, got: usize },
    #[error("invalid linear form: {0}")]
    InvalidLinearForm(String),
    #[error("incompatible rule set: {0}")]
    IncompatibleRules(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("rule index {index} out of range for {count} rules")]
    RuleOutOfRange { index: u32, count: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: u8, got: u8 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("budget exceeded for {what}: needed {needed:?}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: Option<u64>,
        limit: u64,
    },
    #[error("cell {cell} lies outside the materialized expansion of {len} cells")]
    OutsideExpansion { cell: i64, len: usize },
    #[error("rule {rule} has no linear form over GF(2)")]
    NotLinear { rule: String },
    #[error("no applicable method: {0}")]
    NoMethod(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("pattern not found: {0}")]
    NotFound(String),
    #[error("verification failed: {0}")]
    Verification(String),
}
