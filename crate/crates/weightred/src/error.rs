use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("p = {0} is too small, need p >= 3")]
    TooSmall(u32),
    #[error("strict mode requires p > 5, got p = {0}")]
    StrictViolation(u32),
    #[error("element is zero, discrete log undefined")]
    ZeroElement,
    #[error("matrix operands live at different tower levels")]
    LevelMismatch,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("subspaces have different ambient dimensions ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("weight parameters out of range: r={r}, s={s} (need 0..p)")]
    WeightOutOfRange { r: i64, s: i64 },
    #[error("degree d={d} out of range [0, {max}]")]
    DegreeOutOfRange { d: i64, max: u32 },
    #[error("unit order f={0} does not divide q-1")]
    BadUnitOrder(u32),
    #[error("map is not injective (rank {rank} < dim {dim})")]
    NotInjective { rank: usize, dim: usize },
    #[error("map is not equivariant for a group generator")]
    NotEquivariant,
    #[error("dimension mismatch: got {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("maps do not compose: {0}x{1} after {2}x{3}")]
    NotComposable(usize, usize, usize, usize),
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
    #[error("eigenspaces do not exhaust the module (found {found} of {dim})")]
    IncompleteEigenbasis { found: usize, dim: usize },
    #[error("constituent lists disagree between the subset rule and the closed form")]
    InternalMismatch,
    #[error("composition factor of dimension {0} matches no weight label")]
    UnidentifiedFactor(usize),
    #[error("discriminant must be negative, got {0}")]
    NonNegative(i64),
    #[error("discriminant {0} is not 0 or 1 mod 4")]
    BadResidue(i64),
    #[error("discriminant {0} is not fundamental")]
    NotFundamental(i64),
    #[error("prime {0} ramifies (divides the discriminant)")]
    Ramified(u64),
    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
