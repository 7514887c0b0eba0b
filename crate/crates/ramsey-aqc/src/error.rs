//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the encoding, oracle, Hamiltonian, and evolution layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex pair (i={i}, j={j}) for N={n}: require 1 <= j < i <= N")]
    InvalidVertexPair { i: usize, j: usize, n: usize },

    #[error("adjacency matrix is not symmetric at ({i},{j})")]
    Asymmetric { i: usize, j: usize },

    #[error("adjacency matrix has a nonzero diagonal entry at vertex {i}")]
    NonzeroDiagonal { i: usize },

    #[error("bit-string length {len} is not N(N-1)/2 for any N >= 2")]
    NotTriangular { len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid character {ch:?} in bit string (expected '0' or '1')")]
    BadBitChar { ch: char },

    #[error("malformed edge-list line {line:?}")]
    BadEdgeLine { line: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("resource cap exceeded: L={l} qubits over cap {cap}")]
    CapExceeded { l: usize, cap: usize },

    #[error("qubit cap reached before the Ramsey threshold was found (last N tried: {last_n})")]
    CapBeforeThreshold { last_n: usize },

    #[error("state-vector norm drifted by {drift:e}, over tolerance {tol:e}")]
    NormDrift { drift: f64, tol: f64 },

    #[error("state vector is not normalized: |norm - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    EigensolverStalled { residual: f64, iterations: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor for parameter-validation failures.
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
