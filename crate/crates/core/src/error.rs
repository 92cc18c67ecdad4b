use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("reflectivity must lie strictly between 0 and 1, got {0}")]
    InvalidReflectivity(f64),
    #[error("asymmetric beam splitter required, got R = T = 0.5")]
    SymmetricBeamSplitter,
    #[error("time bin {0} exceeds the tracked window")]
    BinOverflow(usize),
    #[error("state is not normalized: total probability {0}")]
    NotNormalized(f64),
    #[error("generator not full rank")]
    RankDeficient,
    #[error("enumeration too large: k = {0}")]
    EnumerationTooLarge(usize),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("invalid bit string: {0}")]
    InvalidBitString(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("r must be nonzero")]
    ZeroMask,
    #[error("committed subset empty; choose different r")]
    EmptyCoset,
    #[error("codewords too close for a midpoint: distance {0}")]
    DistanceTooSmall(usize),
    #[error("no pair of codewords with different parities exists for this r")]
    NoCrossCosetPair,
    #[error("incoming state is not an honest encoding")]
    MalformedIncoming,
    #[error("coupling is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("policy does not fit the session parameters: {0}")]
    PolicyMismatch(String),
    #[error("intercept count {intercepts} must stay below n - d = {limit}")]
    IllegitimateOperation { intercepts: usize, limit: usize },
    #[error("gamma register not initialized to |2> on intercepted positions")]
    GammaNotInitialized,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("composite model limited to n <= {max}, got {n}")]
    DimensionGuard { n: usize, max: usize },
    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),
}
