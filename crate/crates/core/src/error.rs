use thiserror::Error;

/// Errors shared by the whole library.
///
/// Operations that can only fail on malformed input return `Result<_, Error>`;
/// the variants carry enough context to report the offending object by name.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("map cannot be restricted: nonzero coefficient on dropped coordinate {0}")]
    NonRestrictable(usize),
    #[error("value is not an integer: {0}")]
    NonIntegral(String),
    #[error("set is empty")]
    EmptySet,
    #[error("objective is unbounded below on the set")]
    Unbounded,
    #[error("requested face is empty")]
    EmptyFace,
    #[error("no affine threshold found: {0}")]
    NoThreshold(String),
    #[error("piecewise map has a piece with value +∞")]
    InfinitePiece,
    #[error("map does not diverge on the frontier: {0}")]
    NotDivergent(String),
    #[error("not a facet: {0}")]
    NotAFacet(String),
    #[error("boundary family mismatch: {0}")]
    CoverMismatch(String),
    #[error("cell is not monohedral: {0}")]
    NotMonohedral(String),
    #[error("family is not a complex: {0}")]
    NotAComplex(String),
    #[error("input is closed where a non-closed cell is required")]
    ClosedInput,
    #[error("union is not relatively open")]
    NotRelativelyOpen,
    #[error("enumeration budget exceeded: need {need} points, budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    #[error("discontinuous or malformed valuation map: {0}")]
    DiscontinuousEpsilon(String),
    #[error("invalid precell: {0}")]
    InvalidPrecell(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
