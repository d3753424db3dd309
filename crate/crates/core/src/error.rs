use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ambient space: fiber_dim = {fiber_dim}, max_degree = {max_degree} (both must be >= 1)")]
    InvalidAmbient { fiber_dim: usize, max_degree: usize },

    #[error("invalid Brownian parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid inner function: {0}")]
    InvalidInner(String),

    #[error("evaluation point |w| = {0} lies outside the closed unit disc")]
    OutsideDisc(f64),

    #[error("degree budget exhausted: {0}; increase N")]
    InsufficientDegree(String),

    #[error("numerator does not vanish at the boundary point (|h(e^iθ)| = {boundary_value:e}, tolerance {tolerance:e})")]
    NonVanishingNumerator { boundary_value: f64, tolerance: f64 },

    #[error("ambiguous rank decision in {context}: singular value {value:e} inside band [{low:e}, {high:e}]; increase N")]
    RankAmbiguous {
        context: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not unitary: {context} (defect {defect:e})")]
    NotUnitary { context: &'static str, defect: f64 },

    #[error("compatibility condition fails for defect element {index}: |U_E x1' - x2'| = {mismatch:e}")]
    Incompatible { index: usize, mismatch: f64 },
}
