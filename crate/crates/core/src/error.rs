use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into domain errors (the mathematical precondition of an
/// operation fails for the given weight or space) and input errors
/// (malformed parameters, budgets, schema problems).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("trivial space: sup_j phi(2^j) 2^(-jd/p) is infinite, so m_(phi,p) = {{0}}")]
    TrivialSpace,
    #[error("weight is not in G_p(D) for p = {p}")]
    NotGp { p: f64 },
    #[error("weight is not in G_p(D) for any p > 0: {reason}")]
    NotInAnyGp { reason: String },
    #[error("weight is not normalized (phi(1) = {value}, expected 1)")]
    NotNormalized { value: f64 },
    #[error("embedding is not continuous (criterion supremum = {criterion_sup})")]
    NotContinuous { criterion_sup: f64 },
    #[error("weight is bounded (sup phi = {sup}); the construction needs sup phi = infinity")]
    BoundedWeight { sup: f64 },
    #[error("lim 2^(-kd/p) phi(2^k) = {limit} > 0; the construction needs a zero limit")]
    LimitPositive { limit: f64 },
    #[error("construction requires p >= 1 (got p = {p})")]
    QuasiBanachUnsupported { p: f64 },
    #[error("sequence support point {point} lies outside the cube Q_(-{level},0)")]
    SupportOutOfRange { point: String, level: u32 },
    #[error("enumeration budget exceeded: {needed} items requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("dyadic level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },
    #[error("dimension mismatch: expected d = {expected}, got d = {got}")]
    DimensionMismatch { expected: u32, got: u32 },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// True for errors that report a failed mathematical precondition
    /// rather than malformed input.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::TrivialSpace
                | Error::NotGp { .. }
                | Error::NotInAnyGp { .. }
                | Error::NotNormalized { .. }
                | Error::NotContinuous { .. }
                | Error::BoundedWeight { .. }
                | Error::LimitPositive { .. }
                | Error::QuasiBanachUnsupported { .. }
                | Error::SupportOutOfRange { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TrivialSpace => "TrivialSpace",
            Error::NotGp { .. } => "NotGp",
            Error::NotInAnyGp { .. } => "NotInAnyGp",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NotContinuous { .. } => "NotContinuous",
            Error::BoundedWeight { .. } => "BoundedWeight",
            Error::LimitPositive { .. } => "LimitPositive",
            Error::QuasiBanachUnsupported { .. } => "QuasiBanachUnsupported",
            Error::SupportOutOfRange { .. } => "SupportOutOfRange",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::LevelTooLarge { .. } => "LevelTooLarge",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Schema(_) => "Schema",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
