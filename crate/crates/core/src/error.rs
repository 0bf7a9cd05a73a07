use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("ill-posed boundary conditions: {0}")]
    IllPosedBoundary(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("configuration error: {0}")]
    Config(String),
}
