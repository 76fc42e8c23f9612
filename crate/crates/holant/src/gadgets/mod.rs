//! Gadget constructions: recorded recipes, verified extraction searches,
//! the triangle symmetrisation and the hard-core pinning pipeline.

pub mod extract;
pub mod hardcore;
pub mod recipe;
pub mod symmetrize;

pub use crate::signatures::{contract_unary, holographic, self_loop};
pub use extract::{binary_escape, pr_binary_extract, ternary_extract, Isotropic};
pub use hardcore::{
    extract_hard_core, is_equality4_source, HardCoreKind, HardCoreOutcome, HardCoreTrace,
    SupportPair,
};
pub use recipe::{GadgetRecipe, Step};
pub use symmetrize::{
    symmetrize, symmetrize_to_ghz, triangle_recipe, triangle_symmetrize, unary_chain,
    unary_chain_recipe, ChainSign,
};
