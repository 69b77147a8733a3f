//! Exact-arithmetic Hecke algebras and newform certification for `Gamma_0(N)`.
//!
//! The crate has four mathematical layers:
//!
//! * [`linalg`] — dense exact linear algebra over `Q` (row echelon forms,
//!   kernels, eigenspaces, a subspace lattice);
//! * [`local`] — the finite model of `K = GL_2(Z_p)` modulo `p^n`: coset and
//!   double-coset enumeration for `K_0(p^n)`, exact convolution in the finite
//!   Hecke algebra, its structure constants and eigenvector table, and the
//!   decomposition of the induced representation `I(n)`;
//! * [`modsym`] — weight-`w` modular symbols for `Gamma_0(N)` over `Q` in the
//!   Manin presentation, with the cuspidal subspace, a generic engine that
//!   applies formal sums of integer matrices, Hecke operators, the star
//!   involution and degeneracy maps between levels;
//! * [`newform`] — the classical operators (`U~_p`, `W_Q`, `Q_p`, `S_{p^n,r}`,
//!   twist squares) built on cuspidal symbols, plus checkers that certify the
//!   new-space and old-space eigenspace characterizations as exact subspace
//!   identities.
//!
//! Everything is exact rational arithmetic; a failed identity is a bug or a
//! false claim, never a tolerance issue. [`report`], [`cache`] and [`config`]
//! supply the JSON reporting schema, the on-disk space cache and CLI
//! configuration used by the `newspace` binary.

pub mod cache;
pub mod config;
pub mod linalg;
pub mod local;
pub mod modsym;
pub mod newform;
pub mod report;
pub mod runner;

pub use linalg::{QMatrix, Rational, Subspace};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size bound exceeded: {0}")]
    SizeBound(String),
    #[error("operator does not preserve subspace: {0}")]
    NotInvariant(String),
    #[error("level factorization does not match the requested check: {0}")]
    ShapeMismatch(String),
    #[error("structural integrality violation: {0}")]
    NonIntegral(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
