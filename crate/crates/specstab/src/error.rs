use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("domain is empty")]
    EmptyDomain,

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("value overflows beyond k = {largest_safe_k}: {what}")]
    Range { what: String, largest_safe_k: usize },

    #[error("eigensolver did not converge: achieved residuals {achieved:?} (tol {tol})")]
    Solver { achieved: Vec<f64>, tol: f64 },

    #[error("ambiguous eigenvalue clustering: {0}")]
    Clustering(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
