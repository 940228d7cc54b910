//! Crate-wide error type.

use std::fmt;

use crate::index_filters::DefinableSet;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Formula, set, rule, or descriptor text failed to parse.
    Syntax { pos: usize, msg: String },
    /// A sentence context referenced a variable that is not bound.
    UnboundVariable { var: String },
    /// A quantifier rebinds a variable already bound on the same path.
    ShadowedVariable { var: String },
    /// A quantifier would explore more element tuples than the configured cap.
    CapExceeded { size: u64, cap: u64 },
    /// Materialized structure size exceeds the engine limit.
    StructureTooLarge { size: u128, cap: u64 },
    /// An operation required a prime where a composite was supplied.
    NotPrime(u64),
    /// Two ultraproduct elements from different families were combined.
    FamilyMismatch { left: String, right: String },
    /// A constrained filter's assumption base has finite intersection.
    InconsistentBase { witness: DefinableSet },
    /// The supplied sets are not a partition of the prime index set.
    NotPartition { reason: String },
    /// A value rule violates the integer-valued polynomial contract.
    InvalidRule { reason: String },
    /// A residue query is not eventually constant on a congruence class.
    NotClassConstant { modulus: u64, class: u64 },
    /// A sequence was rejected by the filtration membership check.
    RejectedSequence { reason: String },
    /// A single-term operation was applied to a multi-term monomial sum.
    NotSingleTerm { terms: usize },
    /// A rule used as a natural number is not eventually non-negative.
    NotEventuallyNonnegative { rule: String },
    /// Anything else that is a caller error rather than an engine bug.
    Unsupported { msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
            Error::UnboundVariable { var } => write!(f, "unbound variable `{var}`"),
            Error::ShadowedVariable { var } => {
                write!(f, "variable `{var}` is bound twice on one path")
            }
            Error::CapExceeded { size, cap } => write!(
                f,
                "quantifier would explore {size} element tuples, cap is {cap}"
            ),
            Error::StructureTooLarge { size, cap } => {
                write!(f, "structure size {size} exceeds cap {cap}")
            }
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::FamilyMismatch { left, right } => {
                write!(f, "family mismatch: {left} vs {right}")
            }
            Error::InconsistentBase { witness } => write!(
                f,
                "assumption base is inconsistent: intersection is the finite set {witness}"
            ),
            Error::NotPartition { reason } => write!(f, "not a partition: {reason}"),
            Error::InvalidRule { reason } => write!(f, "invalid value rule: {reason}"),
            Error::NotClassConstant { modulus, class } => write!(
                f,
                "rule is not eventually constant mod {modulus} on the class {class} mod {modulus}"
            ),
            Error::RejectedSequence { reason } => write!(f, "sequence rejected: {reason}"),
            Error::NotSingleTerm { terms } => {
                write!(f, "expected a single monomial, found {terms} terms")
            }
            Error::NotEventuallyNonnegative { rule } => {
                write!(f, "rule {rule} is not eventually non-negative")
            }
            Error::Unsupported { msg } => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
