//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by lattice validation, module arithmetic and the
/// operator-expansion machinery.
///
/// Every failure carries enough context to point at the offending input;
/// none of the library entry points panic on bad user data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    /// The Gram matrix is not symmetric at the reported entry.
    #[error("gram matrix is not symmetric at entry ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    /// A diagonal Gram entry is odd, so the lattice is not even.
    #[error("gram matrix has odd diagonal entry at index {i}; the lattice must be even")]
    NotEven { i: usize },

    /// A leading principal minor is non-positive, so the form is not
    /// positive definite.
    #[error("gram matrix is not positive definite: leading principal minor of order {order} is not positive")]
    NotPositiveDefinite { order: usize },

    /// The matrix handed to a constructor is not square.
    #[error("expected a square matrix, got {rows} rows and {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    /// A vector has the wrong length for the ambient rank.
    #[error("dimension mismatch: expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A vector that must lie in the dual lattice does not.
    #[error("vector does not lie in the dual lattice")]
    NotInDual,

    /// A vector that must lie in the lattice itself does not.
    #[error("vector does not lie in the lattice")]
    NotInLattice,

    /// Enumerating all cosets would exceed the configured bound.
    #[error("discriminant group has order {order}, exceeding the enumeration bound {bound}")]
    DeterminantTooLarge { order: String, bound: String },

    /// A root of unity expected to be a sign evaluated to something else.
    #[error("value is a root of unity of exponent {exponent} (mod {two_q}), not +1 or -1")]
    NotPlusMinusOne { exponent: i64, two_q: i64 },

    /// A documented precondition of an operation was violated.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// A character twist left the enumerated set of central characters.
    #[error("twisted character is not among the enumerated central characters")]
    NotClosed,

    /// A module label does not name a module of the current classification.
    #[error("unrecognized module label: {0}")]
    UnclassifiedModule(String),

    /// An operand of a decomposition check is not block diagonal for the
    /// requested split.
    #[error("gram matrix is not block diagonal for the split {left}+{right}")]
    NotBlockDiagonal { left: usize, right: usize },

    /// A series was queried beyond the order it was computed to.
    #[error("series cutoff too small: requested order {requested} exceeds computed order {computed} (doubled exponents)")]
    CutoffTooSmall { requested: i64, computed: i64 },

    /// A textual argument could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, FusionError>;
