use thiserror::Error;

/// Errors raised by the library. Subset-valued fields are bitmasks
/// (state `i` is bit `i - 1`).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state count {n} outside the supported range {min}..={max}")]
    InvalidStateCount { n: usize, min: usize, max: usize },

    #[error("operation needs n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("Möbius mass must vanish on the empty set")]
    InvalidMass,

    #[error("not a capacity: {reason}")]
    NotACapacity { reason: CapacityViolation },

    #[error("set function is not a belief function (negative mass on subset {subset:#b})")]
    NotBelief { subset: u32 },

    #[error("invalid market model: {0}")]
    InvalidModel(String),

    #[error("market is not viable: need m1 > 1+r > mn")]
    NotViable,

    #[error("degenerate rate: 1+r equals the lowest return mn")]
    DegenerateRate,

    #[error("operation requires n > 2 states (complete binomial market)")]
    CompleteMarket,

    #[error("assessment has no upper prices to normalize")]
    NoUpperPrices,

    #[error("assessment is two-sided; normalize it first")]
    TwoSidedAssessment,

    #[error("invalid assessment: {0}")]
    InvalidAssessment(String),

    #[error("contamination weight must lie strictly between 0 and 1")]
    EpsOutOfRange,

    #[error("reference measure is not equivalent: zero mass on state {state}")]
    NotEquivalent { state: usize },

    #[error("reference measure is not a probability")]
    NotAProbability,

    #[error("linear program dimensions are inconsistent: {0}")]
    DimensionMismatch(String),

    #[error("quadratic program did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("optimization problem is infeasible")]
    Infeasible,

    #[error("certificate failed verification: {0}")]
    CertificateRejected(String),
}

impl Error {
    /// Stable variant name, used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidStateCount { .. } => "InvalidStateCount",
            Error::TooLarge { .. } => "TooLarge",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidMass => "InvalidMass",
            Error::NotACapacity { .. } => "NotACapacity",
            Error::NotBelief { .. } => "NotBelief",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NotViable => "NotViable",
            Error::DegenerateRate => "DegenerateRate",
            Error::CompleteMarket => "CompleteMarket",
            Error::NoUpperPrices => "NoUpperPrices",
            Error::TwoSidedAssessment => "TwoSidedAssessment",
            Error::InvalidAssessment(_) => "InvalidAssessment",
            Error::EpsOutOfRange => "EpsOutOfRange",
            Error::NotEquivalent { .. } => "NotEquivalent",
            Error::NotAProbability => "NotAProbability",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotConverged { .. } => "NotConverged",
            Error::Infeasible => "Infeasible",
            Error::CertificateRejected(_) => "CertificateRejected",
        }
    }
}

/// Which capacity axiom failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacityViolation {
    EmptySetNonzero,
    FullSetNotOne,
    /// `subset ⊆ superset` but the value decreases.
    Monotonicity { subset: u32, superset: u32 },
}

impl std::fmt::Display for CapacityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapacityViolation::EmptySetNonzero => write!(f, "value at the empty set is not 0"),
            CapacityViolation::FullSetNotOne => write!(f, "value at the full set is not 1"),
            CapacityViolation::Monotonicity { subset, superset } => {
                write!(f, "phi({subset:#b}) > phi({superset:#b}) although {subset:#b} ⊆ {superset:#b}")
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
