use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("leg structure mismatch: {0}")]
    Legs(String),
    #[error("not representable on the exact backend: {0}")]
    NotRepresentable(String),
    #[error("operation requires the numeric backend: {0}")]
    NumericOnly(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("eigenvalue not found in spectrum (closest singular value {0:.3e})")]
    EigenvalueNotFound(f64),
    #[error("eigenvalue cluster unresolved (singular value {0:.3e} inside the guard band)")]
    ClusterUnresolved(f64),
    #[error("projector is not idempotent (residual {0:.3e})")]
    NotIdempotent(f64),
    #[error("R-hat fails the quadratic Hecke relation (residual {0:.3e})")]
    HeckeRelation(f64),
    #[error("fusion twist is not central (residual {0:.3e})")]
    NotCentral(f64),
    #[error("degree margin {margin} exhausts the model space of degree {degree}")]
    MarginExhausted { margin: usize, degree: usize },
    #[error("representation mismatch: {0}")]
    RepMismatch(String),
    #[error("degenerate highest-weight kernel of dimension {0}")]
    DegenerateKernel(usize),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("Clebsch-Gordan coefficient vanishes where the matrix element is {0:.3e}")]
    SelectionRule(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
