//! Tableau prover and countermodel generator for two-dimensional hybrid
//! product logic and its dependent-product variants.

pub mod audit;
pub mod differential;
pub mod engine;
pub mod extract;
pub mod semantics;
pub mod syntax;
