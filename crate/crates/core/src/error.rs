use thiserror::Error;

/// Errors raised by the core library.
///
/// Variants fall in two groups: invalid input (the group, element or
/// distribution does not satisfy the model's hypotheses) and findings, where
/// an internal consistency check that the theory guarantees has failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("contains 2-torsion")]
    TwoTorsion,
    #[error("primes must be pairwise distinct (repeated {0})")]
    RepeatedPrime(u64),
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("component exponent must be positive, got {0}")]
    NonPositiveExponent(i64),
    #[error("group is too large: {0}")]
    GroupTooLarge(String),
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u64, u64),
    #[error("cyclotomic order must be odd and positive, got {0}")]
    EvenOrder(u64),
    #[error("not invertible")]
    NotInvertible,
    #[error("invalid p-adic unit: {0}")]
    InvalidUnit(String),
    #[error("level exceeded: requested {requested}, available {available}")]
    LevelExceeded { requested: u32, available: u32 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("not an automorphism")]
    NotAutomorphism,
    #[error("support exceeds declared level")]
    SupportExceedsLevel,
    #[error("prime collision between K and the quasicyclic component: {0}")]
    PrimeCollision(u64),
    #[error("construction hypothesis violated: {0}")]
    ConstructionHypothesis(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no valid shift found")]
    NoValidShift,
    #[error("lambda mismatch")]
    LambdaMismatch,
    #[error("route disagreement: {0}")]
    RouteDisagreement(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("constructed instance is not conditionally symmetric")]
    ConstructionNotSymmetric,
}

impl Error {
    /// True for errors that contradict the theory rather than reject input.
    pub fn is_finding(&self) -> bool {
        matches!(
            self,
            Error::NoValidShift
                | Error::LambdaMismatch
                | Error::RouteDisagreement(_)
                | Error::NotSubgroup(_)
                | Error::ConstructionNotSymmetric
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TwoTorsion => "two_torsion",
            Error::RepeatedPrime(_) => "repeated_prime",
            Error::NotPrime(_) => "not_prime",
            Error::NonPositiveExponent(_) => "non_positive_exponent",
            Error::GroupTooLarge(_) => "group_too_large",
            Error::SpecMismatch(_) => "spec_mismatch",
            Error::OrderMismatch(..) => "order_mismatch",
            Error::EvenOrder(_) => "even_order",
            Error::NotInvertible => "not_invertible",
            Error::InvalidUnit(_) => "invalid_unit",
            Error::LevelExceeded { .. } => "level_exceeded",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::NotAutomorphism => "not_automorphism",
            Error::SupportExceedsLevel => "support_exceeds_level",
            Error::PrimeCollision(_) => "prime_collision",
            Error::ConstructionHypothesis(_) => "construction_hypothesis",
            Error::Precondition(_) => "precondition",
            Error::NoValidShift => "no_valid_shift",
            Error::LambdaMismatch => "lambda_mismatch",
            Error::RouteDisagreement(_) => "route_disagreement",
            Error::NotSubgroup(_) => "not_subgroup",
            Error::ConstructionNotSymmetric => "construction_not_symmetric",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
