use thiserror::Error;

/// Errors raised by the model, dynamics and averaging layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("apparatus size must be at least 2, got {0}")]
    TooSmall(usize),

    #[error("base action constant must be positive and finite, got {0}")]
    InvalidActionConstant(f64),

    #[error("pattern length {found} does not match apparatus size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid pattern character {0:?}, expected '0' or '1'")]
    InvalidPatternChar(char),

    #[error("state norm {norm} is neither 1 nor 0 within tolerance")]
    Unnormalized { norm: f64 },

    #[error("incident amplitudes have total weight {weight}, expected 1")]
    IncidentUnnormalized { weight: f64 },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("orbit-based and dense representations cannot be mixed")]
    MixedRepresentation,

    #[error("state is not supported on the propagator's orbit")]
    OrbitMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense path limited to n <= {cap}, requested n = {n}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("budget exponent alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("defect budget {budget} is not below n/2 for n = {n}; the cocked set is degenerate")]
    BudgetTooLarge { n: usize, budget: usize },

    #[error("initial pattern has shift period {period} < n = {n}")]
    ShiftInvariantPattern { period: usize, n: usize },

    #[error("quadrature needs at least one sample")]
    NoSamples,

    #[error("extrapolation needs at least two samples, got {0}")]
    TooFewSamples(usize),

    #[error("extrapolation design is degenerate: all kappa_n/n are equal")]
    DegenerateDesign,

    #[error("orbit count for n = {0} overflows 128-bit arithmetic")]
    CountOverflow(usize),

    #[error("cannot place {defects} distinct defects in {n} positions")]
    TooManyDefects { defects: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
