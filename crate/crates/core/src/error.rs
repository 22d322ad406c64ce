use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("lattice containment fails: {0}")]
    NotContained(String),

    #[error("quotient has torsion with invariant factors {0:?}")]
    Torsion(Vec<String>),

    #[error("point is outside the polytope")]
    OutsidePolytope,

    #[error("configuration is not homogeneous: no functional takes the value 1 on every column")]
    Inhomogeneous,

    #[error("configuration has repeated column {0}")]
    RepeatedColumn(usize),

    #[error("invalid column index {0}")]
    InvalidColumn(usize),

    #[error("not a face of the Newton polytope")]
    NotAFace,

    #[error("wrong dimension: {0}")]
    WrongDimension(String),

    #[error("degenerate heights: lower hull cell with {points} points is not a simplex (perturb the heights)")]
    DegenerateHeights { points: usize },

    #[error("enumeration cap exceeded: {size} points > cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("symbolic budget exceeded: {0}")]
    Budget(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical continuation failed: {0}")]
    Numeric(String),

    #[error("inconsistent linear system")]
    Inconsistent,
}

pub type Result<T> = std::result::Result<T, Error>;
