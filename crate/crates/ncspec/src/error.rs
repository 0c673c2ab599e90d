use thiserror::Error;

/// Every failure the library can report. Variant names are stable and are
/// echoed verbatim in CLI reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not owned by ring {ring}")]
    ElementOwnershipMismatch { ring: String },
    #[error("operation {op} expects {expected} argument(s), got {got}")]
    ArityMismatch { op: String, expected: usize, got: usize },
    #[error("unsupported ring class for {op}: {ring}")]
    UnsupportedClass { op: String, ring: String },
    #[error("ring {ring} is infinite")]
    InfiniteRing { ring: String },
    #[error("not a homomorphism: {witness}")]
    NotAHomomorphism { witness: String },
    #[error("identity element is not preserved")]
    IdentityNotPreserved,
    #[error("cannot compose: {detail}")]
    CompositionMismatch { detail: String },
    #[error("skew localization needs scalar multiples of monomials, got {element}")]
    NonMonomialSkewSubset { element: String },
    #[error("subsets are not comparable: {detail}")]
    NotComparable { detail: String },
    #[error("no decision procedure applies to this square: {detail}")]
    UnverifiableSquare { detail: String },
    #[error("set is not open (not an upper set)")]
    NotOpen,
    #[error("map does not preserve joins: {witness}")]
    NotJoinPreserving { witness: String },
    #[error("polynomial {poly} is reducible over the rationals")]
    NotIrreducibleCertificate { poly: String },
    #[error("family of opens does not cover the space")]
    NotACover,
    #[error("ring {ring} is not commutative")]
    NotCommutative { ring: String },
    #[error("base is not multiplicative: {detail}")]
    BaseNotMultiplicative { detail: String },
    #[error("space is not T0: points {a} and {b} are not separated")]
    NotT0 { a: usize, b: usize },
    #[error("not a T-complete join-semilattice: {witness}")]
    NotTComplete { witness: String },
    #[error("Ore condition fails for r = {r}, s = {s}")]
    OreConditionFails { r: String, s: String },
    #[error("multiplicative closure still growing after {bound} factors")]
    ClosureBoundExceeded { bound: usize },
    #[error("cocycle condition violated: {witness}")]
    CocycleViolation { witness: String },
    #[error("subset is not an Ore set: {detail}")]
    NotOre { detail: String },
    #[error("relation {index} is not homogeneous")]
    InhomogeneousRelation { index: usize },
    #[error("truncation box too small: degree {degree} changed from {before} to {after} when bounds were enlarged")]
    BoxTooSmall { degree: i64, before: usize, after: usize },
    #[error("annihilation not reached within bound {bound}")]
    BoundInconclusive { bound: usize },
    #[error("operands belong to different rings")]
    OwnerMismatch,
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
}

impl Error {
    /// The bare variant name, used as the `error` field of reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ElementOwnershipMismatch { .. } => "ElementOwnershipMismatch",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::UnsupportedClass { .. } => "UnsupportedClass",
            Error::InfiniteRing { .. } => "InfiniteRing",
            Error::NotAHomomorphism { .. } => "NotAHomomorphism",
            Error::IdentityNotPreserved => "IdentityNotPreserved",
            Error::CompositionMismatch { .. } => "CompositionMismatch",
            Error::NonMonomialSkewSubset { .. } => "NonMonomialSkewSubset",
            Error::NotComparable { .. } => "NotComparable",
            Error::UnverifiableSquare { .. } => "UnverifiableSquare",
            Error::NotOpen => "NotOpen",
            Error::NotJoinPreserving { .. } => "NotJoinPreserving",
            Error::NotIrreducibleCertificate { .. } => "NotIrreducibleCertificate",
            Error::NotACover => "NotACover",
            Error::NotCommutative { .. } => "NotCommutative",
            Error::BaseNotMultiplicative { .. } => "BaseNotMultiplicative",
            Error::NotT0 { .. } => "NotT0",
            Error::NotTComplete { .. } => "NotTComplete",
            Error::OreConditionFails { .. } => "OreConditionFails",
            Error::ClosureBoundExceeded { .. } => "ClosureBoundExceeded",
            Error::CocycleViolation { .. } => "CocycleViolation",
            Error::NotOre { .. } => "NotOre",
            Error::InhomogeneousRelation { .. } => "InhomogeneousRelation",
            Error::BoxTooSmall { .. } => "BoxTooSmall",
            Error::BoundInconclusive { .. } => "BoundInconclusive",
            Error::OwnerMismatch => "OwnerMismatch",
            Error::ParseError { .. } => "ParseError",
            Error::SchemaViolation { .. } => "SchemaViolation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
