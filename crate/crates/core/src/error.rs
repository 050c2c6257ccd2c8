use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is rank deficient (numerical rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("too few observations: n = {n} must exceed k = {k}")]
    TooFewObservations { n: usize, k: usize },

    #[error("at least {required} non-intercept regressors are needed, found {found}")]
    TooFewRegressors { required: usize, found: usize },

    #[error("column '{0}' is constant")]
    ConstantColumn(String),

    #[error("response has zero total variation")]
    ConstantResponse,

    #[error("auxiliary regression of '{0}' is a perfect fit (infinite VIF)")]
    PerfectFit(String),

    #[error("t statistic of '{0}' is zero, replication bound is infinite")]
    DegenerateT(String),

    #[error("zero norm: {0}")]
    ZeroNorm(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("cannot parse {value:?} at row {row}, column '{column}'")]
    Parse { row: usize, column: String, value: String },

    #[error("file is empty")]
    EmptyFile,

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("all {0} perturbation trials failed")]
    AllTrialsFailed(usize),
}
