//! Crate-wide error type.
//!
//! Errors fall into a few families: malformed algebra descriptions, term
//! evaluation mismatches, partitions that fail to be congruences, capacity
//! limits of the packed-cube engine, and text-format parse errors.  The CLI
//! maps these onto distinct exit codes, so the variants stay structured
//! instead of collapsing into strings.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Algebras are tables over `u8` elements; sizes outside `1..=256` are
    /// rejected at construction time.
    #[error("algebra size {size} is out of the supported range 1..=256")]
    SizeOutOfRange { size: usize },

    /// An operation table whose length is not `size^arity`.
    #[error("operation `{symbol}` declares arity {arity} over {size} elements: expected {expected} table entries, found {found}")]
    TableLength {
        symbol: String,
        arity: usize,
        size: usize,
        expected: usize,
        found: usize,
    },

    /// An operation table entry naming a non-element.
    #[error("operation `{symbol}` table entry at index {index} is {value}, outside 0..{size}")]
    TableEntry {
        symbol: String,
        index: usize,
        value: usize,
        size: usize,
    },

    /// Two operations with the same symbol.
    #[error("operation symbol `{symbol}` is declared twice")]
    DuplicateSymbol { symbol: String },

    /// A term refers to an operation symbol the algebra does not have.
    #[error("unknown operation symbol `{symbol}`")]
    UnknownOperation { symbol: String },

    /// A term applies an operation to the wrong number of children.
    #[error("operation `{symbol}` has arity {expected} but is applied to {found} children")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    /// A term mentions a variable the environment does not bind.
    #[error("term variable x{index} is unbound: environment has {bound} entries")]
    UnboundVariable { index: usize, bound: usize },

    /// An element outside the algebra's universe.
    #[error("element {value} is outside the universe 0..{size}")]
    ElementOutOfRange { value: usize, size: usize },

    /// Partitions and algebras over different universe sizes were mixed.
    #[error("universe size mismatch: expected {expected}, found {found}")]
    UniverseMismatch { expected: usize, found: usize },

    /// A partition that is not compatible with some basic operation, reported
    /// with the operation symbol and a witnessing argument tuple.
    #[error("partition is not a congruence: operation `{operation}` maps related tuples to unrelated values at {witness:?}")]
    NotACongruence {
        operation: String,
        witness: Vec<usize>,
    },

    /// A requested computation exceeds a configured capacity bound.
    #[error("capacity exceeded for {what}: needs {needed}, limit is {limit}")]
    Capacity {
        what: String,
        needed: u128,
        limit: u128,
    },

    /// A coordinate index outside `0..k`.
    #[error("coordinate {index} is out of range for dimension {k}")]
    CoordinateRange { index: usize, k: usize },

    /// Two coordinates that must differ coincide.
    #[error("coordinates must be distinct, both are {j}")]
    CoordinateClash { j: usize },

    /// A rotation address entry outside the chain's index range.
    #[error("tree address entry {value} at position {position} is outside 0..={bound}")]
    TreeAddress {
        position: usize,
        value: usize,
        bound: usize,
    },

    /// A caller violated a documented precondition.
    #[error("contract violation: {what}")]
    Contract { what: String },

    /// A Day chain failing one of its defining identities; `family` is the
    /// identity number (1-5), `link` the chain position, `tuple` a witness.
    #[error("chain fails identity ({family}) at link {link} on arguments {tuple:?}")]
    ChainIdentity {
        family: u8,
        link: usize,
        tuple: Vec<usize>,
    },

    /// Text-format parse failure (partitions, terms, cube literals).
    #[error("cannot parse {what} at byte {position}: {message}")]
    Parse {
        what: &'static str,
        position: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Helper for one-off contract violations.
    pub fn contract(what: impl Into<String>) -> Self {
        Error::Contract { what: what.into() }
    }
}
