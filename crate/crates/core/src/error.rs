use thiserror::Error;

/// Errors produced by the order-theoretic, sample, sphere and sharpness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pattern {0} lies outside the pattern poset (length must be at least 2)")]
    DegeneratePattern(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid grid vector: {0}")]
    InvalidGridVector(String),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid linear order: {0}")]
    InvalidOrder(String),

    #[error("invalid sign function: {0}")]
    InvalidSignFunction(String),

    #[error("the zero sample has no support")]
    ZeroSample,

    #[error("sample is not realizable: it must carry at least one + and at least one - sign")]
    NotRealizable,

    /// Two support elements with opposite signs received the same multi-order
    /// image. This can only happen through an implementation bug.
    #[error("internal invariant violated: sets {first} and {second} have opposite signs but equal images {image:?}")]
    IotaCollision {
        first: usize,
        second: usize,
        image: Vec<u32>,
    },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("point lies in both {set} and its antipode; the cover is not antipodal-free")]
    NotAntipodalFree { set: String },

    #[error(
        "geometry of set {0} has no closed-form distance (Voronoi cells are unsupported here)"
    )]
    UnsupportedGeometry(String),

    #[error("epsilon {epsilon} is too large: chi is positive on both signs of set {set}")]
    EpsilonTooLarge { set: String, epsilon: f64 },

    #[error("point is not covered by the cover or its antipode")]
    Uncovered,

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
