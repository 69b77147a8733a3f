//! Weight-`w` modular symbols for `Gamma_0(N)` over the rationals.
//!
//! [`p1`] enumerates the projective line over `Z/NZ`; [`dims`] holds the
//! independent dimension-formula oracle; [`poly`] and [`path`] supply the
//! polynomial coefficients and unimodular path decomposition; [`space`]
//! builds the Manin presentation with its cuspidal subspace; [`ops`] applies
//! formal sums of integer matrices (Hecke operators, the star involution,
//! degeneracy maps between levels).

pub mod dims;
pub mod ops;
pub mod p1;
pub mod path;
pub mod poly;
pub mod space;

pub use dims::dim_formula_oracle;

/// Coordinate vector of a modular symbol over a space's quotient basis.
pub type SymbolVector = Vec<crate::linalg::Rational>;
pub use path::Cusp;
pub use space::ManinSpace;
