use thiserror::Error;

/// Errors raised by the engine.
///
/// Input-shaped errors (parse failures, malformed presentations) are
/// distinguished from bound errors and from violated internal invariants so
/// that front ends can map them onto distinct exit statuses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("entry {0} does not lie in the valuation ring")]
    NonIntegralEntry(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspaces do not form a direct sum decomposition")]
    NotADirectSum,
    #[error("lattice basis is not invertible over the fraction field")]
    DegenerateLattice,
    #[error("quotient of the lattice by a sublattice has torsion")]
    TorsionQuotient,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("monomial degree bound {0} exceeded")]
    DegreeBoundExceeded(u32),
    #[error("coefficient valuation bound {0} exceeded")]
    ValuationBoundExceeded(u32),
    #[error("augmentation does not kill relation {0}")]
    AugmentationNotWellDefined(String),
    #[error("augmentation value of {0} is a unit; the map is not local")]
    NonLocalAugmentation(String),
    #[error("declared codimension {declared} is inconsistent: {reason}")]
    InconsistentCodim { declared: usize, reason: String },
    #[error("module is not finitely generated over the base ring")]
    NotFiniteOverBase,
    #[error("ring is not local at the augmentation: {0}")]
    NotLocal(String),
    #[error("resolution strategy {0} does not apply: {1}")]
    StrategyInapplicable(String, String),
    #[error("resolution verification failed in degree {degree}: {reason}")]
    VerificationFailed { degree: usize, reason: String },
    #[error("resolution too short: need differential d_{needed}, have {available}")]
    ResolutionTooShort { needed: usize, available: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("Kunneth map is not injective")]
    KappaNotInjective,
    #[error("map is not a surjection: {0}")]
    NotASurjection(String),
    #[error("element lies in the second symbolic power of the augmentation prime")]
    InSymbolicSquare,
    #[error("element is not in the augmentation prime")]
    NotInAugmentationPrime,
    #[error("element appears to be a zero divisor on the module")]
    ZeroDivisorSuspected,
    #[error("source and target have different codimensions ({0} vs {1})")]
    NotSameCodim(usize, usize),
    #[error("could not lift degree-one classes to chain maps: {0}")]
    ProductLiftFailed(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
}

impl Error {
    /// True for errors caused by a configured search bound rather than by
    /// the input or by the mathematics.
    pub fn is_bound(&self) -> bool {
        matches!(
            self,
            Error::DegreeBoundExceeded(_) | Error::ValuationBoundExceeded(_)
        )
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
