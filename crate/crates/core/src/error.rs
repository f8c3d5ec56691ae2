use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid bounds: x_min = {x_min} must be finite and below x_max = {x_max}")]
    InvalidBounds { x_min: f64, x_max: f64 },
    #[error("grid needs at least 3 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("cannot normalize a function with zero norm")]
    ZeroNorm,

    #[error("grid must span at least [{lo}, {hi}] for this problem")]
    DomainTooSmall { lo: f64, hi: f64 },
    #[error("kinetic scale must be positive and finite, got {0}")]
    InvalidKineticScale(f64),
    #[error("lowest level is not separated from the next one (gap {gap:e})")]
    NoGap { gap: f64 },
    #[error("computed ground state changes sign at index {index}")]
    NodalGroundState { index: usize },
    #[error("base problem invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parameter {lambda} lies in the deleted interval [-1, 0]")]
    ForbiddenParameter { lambda: f64 },
    #[error("parameter {lambda} must be positive on a half-line problem")]
    HalfLineParameter { lambda: f64 },
    #[error("parameter list is empty")]
    EmptyParameters,
    #[error("denominator vanishes at index {index}")]
    DenominatorVanishes { index: usize },
    #[error("input mode is not normalized (norm² = {norm2})")]
    UnnormalizedInput { norm2: f64 },
    #[error("chain step {depth} failed: {source}")]
    Step {
        depth: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("denominator C1 + C2·ΔF changes sign on [{lo}, {hi}]")]
    SingularDenominator { lo: f64, hi: f64 },
    #[error("leading polynomial coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("parameter set is inadmissible: {0}")]
    Inadmissible(String),
    #[error("running integral is not monotone at index {index}")]
    NonmonotoneInput { index: usize },

    #[error("requested {k} eigenvalues of a {size}x{size} matrix")]
    KOutOfRange { k: usize, size: usize },
    #[error("residual mask is empty")]
    EmptyMask,
}
