//! Operator algebras generated by observable sets: closure bases, block
//! diagonalization, multiplicity reduction, and generation tests.

pub mod block;
pub mod closure;
pub mod generation;
pub mod reduce;

pub use block::{block_diagonalize, BlockStructure};
pub use closure::{star_closure_basis, AlgebraBasis};
pub use generation::{algebra_generation_test, compound_matrix, GenerationReport};
pub use reduce::{reduce_multiplicities, unitary_intertwiner, ReducedObservableSet};
