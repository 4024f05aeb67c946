use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid model polynomial: {0}")]
    InvalidModelPolynomial(String),
    #[error("polynomial is not real-valued")]
    NotReal,
    #[error("polynomial has pluriharmonic terms: {}", .0.join(", "))]
    HasPluriharmonicTerms(Vec<String>),
    #[error("polynomial is not weighted homogeneous of degree 1; found weights {}", .0.join(", "))]
    NotHomogeneous(Vec<String>),
    #[error("model polynomial is zero")]
    ZeroPolynomial,
    #[error("weight vector out of range: {0}")]
    WeightOutOfRange(String),
    #[error("model polynomial depends on w")]
    DependsOnW,
    #[error("vector field weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("vector field is not tangent to the model")]
    NotTangent,
    #[error("not a generalized rotation: {0}")]
    NotGeneralizedRotation(String),
    #[error("internal rank drop: {0}")]
    InternalRankDrop(String),
    #[error("polynomial is not bihomogeneous")]
    NotBihomogeneous,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid chain decomposition: {0}")]
    InvalidChain(String),
    #[error("model is holomorphically degenerate")]
    Degenerate,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("expression is not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("odd power of an absolute value at position {0}")]
    OddAbsolutePower(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
