use thiserror::Error;

/// Every typed failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point violates the hyperboloid invariant: {0}")]
    InvalidPoint(String),
    #[error("angle undefined: segment from the vertex is shorter than tolerance")]
    DegenerateAngle,
    #[error("projection undefined: ideal point is an endpoint of the line")]
    ProjectionUndefined,
    #[error("geodesic line needs distinct endpoints")]
    DegenerateLine,
    #[error("half-space needs distinct points")]
    DegenerateHalfSpace,
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("isometries live in different models ({0} vs {1})")]
    ModelMismatch(String, String),
    #[error("classification is numerically ambiguous (spectral gap {gap:e})")]
    NumericallyAmbiguous { gap: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEps(f64),
    #[error("length parameter must be positive, got {0}")]
    NonpositiveL(f64),
    #[error("translation length {tau} exceeds eps/10 = {limit}")]
    TauTooLarge { tau: f64, limit: f64 },
    #[error("translation length {tau} exceeds eps = {eps}")]
    TauExceedsEps { tau: f64, eps: f64 },
    #[error("bound does not fit in 64 bits")]
    BoundOverflow,
    #[error("power {power} is outside 1..={max}")]
    PowerOutOfRange { power: i64, max: u64 },
    #[error("the two isometries share a fixed point at infinity")]
    SharedFixedPoint,
    #[error("the two geodesics share an endpoint at infinity")]
    SharedEndpoint,
    #[error("starting point has displacement {found}, expected {expected}")]
    PreconditionDisplacement { found: f64, expected: f64 },
    #[error("displacement is not monotone along the segment")]
    MonotonicityViolation,
    #[error("isometry must be {expected}, found {found}")]
    WrongKind { expected: &'static str, found: String },
    #[error("translation length {tau} is below the Case-1 threshold {lambda}")]
    NotCase1 { tau: f64, lambda: f64 },
    #[error("translation length {tau} is above the Case-2 threshold {lambda}")]
    NotCase2 { tau: f64, lambda: f64 },
    #[error("translation lengths differ: {0} vs {1}")]
    UnequalTranslationLengths(f64, f64),
    #[error("half-space disjointness failed: {0}")]
    DisjointnessUnverified(String),
    #[error("no certified pair found before the bound {bound}")]
    SearchExhausted { bound: u64 },
    #[error("word is not an alternating product of both generators")]
    NotAlternating,
    #[error("tube gap {gap} does not exceed the required {required}")]
    HypothesisGapMissing { gap: f64, required: f64 },
    #[error("elliptic input: both generators must be non-elliptic")]
    EllipticInput,
    #[error("pair generates an elementary group ({0})")]
    Elementary(String),
    #[error("word count {words} at depth {depth} exceeds the budget {budget}")]
    DepthTooLarge { depth: usize, words: u128, budget: u128 },
    #[error("word is not reduced")]
    NotReduced,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("oracle found the relation {relation} among the certified generators")]
    OracleRefuted { relation: String, certificate: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate does not match its recomputation in: {}", .0.join(", "))]
    CertificateMismatch(Vec<String>),
    #[error("unknown propcheck suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
