use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    /// A rational function in `H` was evaluated at one of its poles.
    #[error("dynamical pole: factor {factor} vanishes at H = {at}")]
    DynamicalPole { factor: String, at: String },
    #[error("metric is not symmetric")]
    NonSymmetric,
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("dimension below 3 (got {0})")]
    DimensionBelow3(usize),
    #[error("metric matrix is not square")]
    NotSquare,
    #[error("unknown metric preset `{0}`")]
    UnknownPreset(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("not in solution space")]
    NotHarmonic,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("engine requires diagonal metric")]
    NonDiagonalMetric,
    #[error("coefficient still depends on H; substitute an eigenvalue first")]
    Unsubstituted,
    #[error("metric mismatch between operands")]
    MetricMismatch,
    #[error("rule completion exceeded {0} rules")]
    FuelExhausted(usize),
    #[error("tensor rank {0} too large for a dense table")]
    RankTooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
