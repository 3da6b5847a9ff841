use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator {generator} is outside 1..={l}")]
    InvalidGenerator { generator: usize, l: u32 },
    #[error("too many generators: {0} (at most {max})", max = crate::grassmann::MAX_GENERATORS)]
    TooManyGenerators(u32),
    #[error("element is not invertible: body is zero")]
    NotInvertible,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("derivative oracle supplies order {available}, but order {needed} is required")]
    InsufficientOracle { needed: usize, available: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("body-singular: {0}")]
    SingularBody(String),
    #[error("body eigenvalues are not pairwise distinct (gap {0:e})")]
    NonGeneric(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("caustic: {0}")]
    Caustic(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("step guard tripped: {0}")]
    StepGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
