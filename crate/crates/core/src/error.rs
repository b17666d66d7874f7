use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole proximity: |sinh({arg} + i*gamma)| = {modulus:.3e} is below tolerance {tol:.3e}")]
    Pole { arg: C64, modulus: f64, tol: f64 },

    #[error("rapidities u_{a} and u_{b} nearly coincide: modulus {modulus:.3e} is below tolerance {tol:.3e}")]
    CoincidentRapidities { a: usize, b: usize, modulus: f64, tol: f64 },

    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("size guard: {what} = {value} exceeds the limit {limit}")]
    SizeGuard { what: &'static str, value: usize, limit: usize },

    #[error("index error: {0}")]
    Index(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("degenerate Gram matrix at k = {k}, r = {r}: leading minor {minor} is {value:.3e}")]
    DegenerateGram { k: usize, r: usize, minor: usize, value: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("unitary completion failed: {0}")]
    Completion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
