use thiserror::Error;

/// Errors raised across the solver and experiment modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular boundary symbol: {0}")]
    SingularSymbol(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("accuracy failure: {0}")]
    Accuracy(String),
    #[error("fixed point iteration does not contract: factor {factor:.3e} after {iters} iterations")]
    NonContraction { factor: f64, iters: usize },
    #[error("smallness violated: monitor {monitor:.3e} exceeds bound {bound:.3e}")]
    Smallness { monitor: f64, bound: f64 },
    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
