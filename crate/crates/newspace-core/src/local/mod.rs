//! Finite model of `K = GL_2(Z_p)` mod `p^n` and its Hecke algebra.
//!
//! Submodules: [`model`] enumerates cosets and double cosets of `K_0(p^n)`;
//! [`hecke`] is the exact convolution engine with a brute-force oracle;
//! [`relations`] certifies the structure relations and the eigenvector
//! table; [`induced`] decomposes the induced representation `I(n)` and
//! verifies the new-vector uniqueness at the level of `K`-representations.

pub mod hecke;
pub mod induced;
pub mod model;
pub mod relations;

pub use hecke::{brute_force_convolve, convolve, structure_table, HeckeElement};
pub use induced::{induced_decomposition, pi_l_trace, InducedDecomposition};
pub use model::{CosetModel, DoubleCoset, LocalParams, ResidueMatrix};
pub use relations::{eigenvector_table, verify_local_relations, EigenRow};
