//! Finite-level Galois modules: commuting actions, Tate twists, (co)invariants,
//! eigenspaces and splitting tests.

mod casa;
mod module;
mod section;

pub use casa::{casa_check, casa_from_chain, CasaDiagram};
pub use module::{coinvariants, eigenspace, induced_map, invariants, tate_twist, CyclotomicCharacterTable, FiniteGaloisModule};
pub use section::{equivariant_section_exists, lemma_pavia_obstruction, purity_split_check};
