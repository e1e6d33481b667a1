//! Crate-wide error type.

use crate::model::Side;

/// A candidate value attached to a boundary-point error: the value the return
/// map would take if the ambiguous point were assigned to `branch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCandidate {
    pub branch: u8,
    pub value: f64,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Construction-time validation failure (non-finite input, zero rotation
    /// coefficient, empty or degenerate reset, bad argument range).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The field at the requested point on the switching line points away
    /// from the requested side, so no arc through that side starts there.
    #[error("field at y = {y} does not enter side {side:?}")]
    SideMismatch { side: Side, y: f64 },

    /// The polynomial whose roots delimit a branch domain vanished
    /// identically, so the partition construction has nothing to isolate.
    #[error("reset composition is identically equal to the fold value")]
    DegenerateReset,

    /// `y` sits on (or within tolerance of) a partition boundary where branch
    /// membership is ambiguous. `candidates` holds the value each adjacent
    /// branch would produce.
    #[error("y = {y} lies on a branch-domain boundary")]
    BoundaryPoint { y: f64, candidates: Vec<BranchCandidate> },

    /// An operation restricted to a specific reset degree was called with
    /// another one.
    #[error("reset degree {actual} not supported here (expected {expected})")]
    WrongDegree { expected: usize, actual: usize },

    /// Composing branch polynomials along an itinerary would exceed the
    /// configured degree cap.
    #[error("composed degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    /// The asymptotic quantity requested does not exist in this parameter
    /// regime (e.g. a trapping radius for an expanding affine reset).
    #[error("wrong regime: {0}")]
    WrongRegime(String),

    /// An exact binary-expansion operation ran out of digits.
    #[error("insufficient digits: need more than {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },

    /// Argument outside the domain of a map on [0, 1].
    #[error("value {value} outside {domain}")]
    OutOfDomain { value: f64, domain: &'static str },

    /// The orbit reached an equilibrium lying on the switching line and
    /// stays there forever.
    #[error("equilibrium on the switching line reached at y = {y}")]
    EquilibriumReached { y: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
