//! Classical operators on cuspidal symbols and certification of the
//! new-space and old-space eigenspace characterizations.

pub mod checks;
pub mod oracle;
pub mod specs;

pub use checks::{check_lemma_suite, check_operator_identities, check_prime_power_tower, check_section6, check_theorem, TheoremId};
pub use oracle::{new_symbol_space, old_summand};
pub use specs::{AtkinLehnerParams, OperatorHandle, QVariant};
