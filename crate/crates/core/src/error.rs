use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank-deficient implicit map at sampled point (smallest singular value {0:.3e})")]
    RankDeficient(f64),

    #[error("mollified integral did not converge across epsilon halvings (last delta {0:.3e})")]
    NonConvergent(f64),

    #[error("truncation tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    TailBound { bound: f64, tol: f64 },

    #[error("evaluation point within {0} of a singular locus")]
    NearSingular(f64),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
