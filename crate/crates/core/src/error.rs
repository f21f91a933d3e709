use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible fields: Q(zeta_{0}) and Q(zeta_{1})")]
    IncompatibleFields(u32, u32),
    #[error("exponent {k} is not a unit modulo {n}")]
    InvalidAutomorphism { k: u64, n: u32 },
    #[error("element is not real")]
    NotReal,
    #[error("{0} is not contained in this field")]
    NotInField(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("polar vector is isotropic")]
    IsotropicPolarVector,
    #[error("multiplier does not have modulus one")]
    NonUnitMultiplier,
    #[error("generators coincide")]
    IdenticalGenerators,
    #[error("malformed word or relation: {0}")]
    MalformedWord(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("parameters {params} are not allowed for {family}")]
    DisallowedParams { family: String, params: String },
    #[error("{0} is a metadata-only family (no matrices)")]
    MetadataOnlyFamily(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("beta is not cyclotomic: {0}")]
    BetaNotCyclotomic(String),
    #[error("no candidate passes the selection tests for {0}")]
    NoCandidate(String),
    #[error("more than one candidate passes the selection tests for {0}")]
    AmbiguousSelection(String),
    #[error("no stratum table for {0}")]
    NoStratumTable(String),
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("generator entries are not algebraic integers")]
    IntegralityNotEstablished,
    #[error("classification inconclusive: {0}")]
    Inconclusive(String),
    #[error("group order exceeds bound {0}")]
    OrderExceedsBound(usize),
    #[error("matrix does not have the parabolic block shape")]
    NotParabolicShape,
    #[error("form mismatch: {0}")]
    FormMismatch(String),
    #[error("corner entry is not one")]
    NotUnipotentCorner,
    #[error("matrix does not have the isometry block shape")]
    NotIsometryShape,
    #[error("generators do not fix a common boundary point")]
    NotCommonFixedPoint,
    #[error("incomplete cusp profile: {0}")]
    IncompleteProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
