use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("matrix is rank deficient (rank {rank} < {dim})")]
    RankDeficient { rank: usize, dim: usize },
    #[error("linear program did not converge: {0}")]
    LpNumerical(String),
    #[error("{n} generators exceed the enumeration limit {limit}")]
    TooManyGenerators { n: usize, limit: usize },
    #[error("{count} subsets exceed the enumeration limit {limit}")]
    TooManySubsets { count: u128, limit: usize },
    #[error("2^{n} sign vectors exceed the exhaustive limit 2^{limit}")]
    TooManyVertices { n: usize, limit: usize },
    #[error("selected columns are linearly dependent")]
    DependentSubset,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("body is unbounded: {0}")]
    Unbounded(String),
    #[error("epsilon {epsilon} outside {range}")]
    EpsilonOutOfRange { epsilon: f64, range: &'static str },
    #[error("barrier method stalled at round {round}: no admissible column")]
    BarrierStall { round: usize },
    #[error("start point is not strictly interior")]
    StartNotInterior,
    #[error("membership oracle inconsistent along a ray: {0}")]
    OracleInconsistent(String),
    #[error("sparsified generator count {n} is below 2; log factor undefined")]
    DegenerateLog { n: usize },
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("no separating witness found up to scale {scale}")]
    NoWitnessFound { scale: f64 },
    #[error("unsupported body for this operation: {0}")]
    UnsupportedBody(String),
    #[error("value overflows the representable range: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of numerical routines (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::LpNumerical(_)
                | Error::NoConvergence { .. }
                | Error::BarrierStall { .. }
                | Error::OracleInconsistent(_)
                | Error::RankDeficient { .. }
                | Error::NoWitnessFound { .. }
                | Error::Unbounded(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
