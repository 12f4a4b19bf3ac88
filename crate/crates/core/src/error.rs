use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameter matrix is numerically singular")]
    SingularLambda,
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("edge {0} is not a boundary edge")]
    InteriorEdge(usize),
    #[error("degenerate cell {0}")]
    DegenerateCell(usize),
    #[error("boundary conditions: {0}")]
    Boundary(String),
    #[error("factorization of the {0} block failed (matrix not SPD?)")]
    Factorization(&'static str),
    #[error("problem too large for dense diagnostics: {size} > {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("time step {step} did not converge ({iterations} iterations)")]
    StepNotConverged { step: usize, iterations: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
