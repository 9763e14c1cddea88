use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular frequency {omega} is not a non-negative harmonic of 2π/{period}")]
    Incommensurate { omega: f64, period: f64 },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("fields do not share a period ({0} vs {1})")]
    PeriodMismatch(f64, f64),

    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("propagation produced non-finite matrix entries")]
    NonFinite,

    #[error("step-halving check failed: max-norm difference {0:e} exceeds 1e-8")]
    NotConverged(f64),

    #[error("Fisher information undefined at p = {0}")]
    UndefinedFisher(f64),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
