//! Finitely presented abelian groups and certified homomorphisms.

mod group;
mod lattice;
mod matrix;

pub use group::{
    make_hom, merge_invariant_factors, FpAbelianGroup, GroupHom, GroupWord, InvariantFactors,
};
pub use lattice::{AugmentedSolver, BigLattice, ModLattice};
pub use matrix::{smith_normal_form, IntMatrix, SmithForm};
