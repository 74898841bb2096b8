//! Crate-wide error type.
//!
//! Every failure mode carries a stable machine-readable code (see
//! [`Error::code`]) so that callers — in particular the CLI — can report
//! errors in a grep-friendly form without matching on display strings.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Field characteristic is not a prime.
    #[error("characteristic {0} is not prime")]
    InvalidPrime(u64),

    /// Requested field order exceeds the supported range.
    #[error("field order {p}^{e} exceeds the supported maximum of 2^20")]
    FieldTooLarge { p: u64, e: u32 },

    /// Two objects built over different fields were mixed.
    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    /// A coordinate vector has the wrong length for its field/ambient.
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },

    /// Subspaces or matrices from different ambient spaces were mixed.
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    /// Dimensions of paired arguments disagree.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// The two summands do not form a direct-sum decomposition.
    #[error("not complementary: {0}")]
    NotComplementary(String),

    /// A subspace enumeration would exceed the configured cap.
    #[error("enumeration of {count} subspaces exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    /// Two identical codewords were found where distinctness is required.
    #[error("duplicate codeword at sorted positions {0} and {1}")]
    DuplicateCodeword(usize, usize),

    /// A code file violates the on-disk format.
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    /// The operation requires defining polynomials that this code lacks.
    #[error("code is not polynomial-backed")]
    NotPolynomialBacked,

    /// A combination specification violates its preconditions.
    #[error("invalid combine spec: {0}")]
    InvalidSpec(String),

    /// No codeword of the inner code is disjoint from the special subspace.
    #[error("no anchor: no codeword is disjoint from the special subspace")]
    NoAnchor,

    /// The special subspace fails its admissibility condition.
    #[error("bad special space: {0}")]
    BadSpecialSpace(String),

    /// An internal construction produced an object violating its contract.
    #[error("construction bug: {0}")]
    ConstructionBug(String),

    /// A clique element is required to be disjoint from the special
    /// subspace but is not.
    #[error("clique element {index} meets the special subspace in dimension {dim}")]
    NotSDisjoint { index: usize, dim: usize },

    /// A base code required by an iterated construction is unavailable.
    #[error("missing base: {0}")]
    MissingBase(String),

    /// A randomized routine was asked to run with an unusable seed/order.
    #[error("bad seed: {0}")]
    BadSeed(String),

    /// The code that was asked about is empty.
    #[error("operation requires a nonempty code")]
    EmptyCode,

    /// Unknown bound name requested from the catalog.
    #[error("unknown bound name {0:?}")]
    UnknownBound(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "InvalidPrime",
            Error::FieldTooLarge { .. } => "FieldTooLarge",
            Error::FieldMismatch(_) => "FieldMismatch",
            Error::BadLength { .. } => "BadLength",
            Error::AmbientMismatch(_) => "AmbientMismatch",
            Error::DimMismatch(_) => "DimMismatch",
            Error::NotComplementary(_) => "NotComplementary",
            Error::EnumerationTooLarge { .. } => "EnumerationTooLarge",
            Error::DuplicateCodeword(_, _) => "DuplicateCodeword",
            Error::ParseError { .. } => "ParseError",
            Error::NotPolynomialBacked => "NotPolynomialBacked",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NoAnchor => "NoAnchor",
            Error::BadSpecialSpace(_) => "BadSpecialSpace",
            Error::ConstructionBug(_) => "ConstructionBug",
            Error::NotSDisjoint { .. } => "NotSDisjoint",
            Error::MissingBase(_) => "MissingBase",
            Error::BadSeed(_) => "BadSeed",
            Error::EmptyCode => "EmptyCode",
            Error::UnknownBound(_) => "UnknownBound",
            Error::Io(_) => "Io",
        }
    }
}
