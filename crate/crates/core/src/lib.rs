//! Finite workbench for combinatorial principles below Ramsey's theorem for
//! pairs: instance translations, exact solvers, two priority constructions
//! run to a finite horizon, and the family and forcing-condition algebra.

pub mod corpus;
pub mod diagonalization;
pub mod families;
pub mod forcing;
pub mod instances;
pub mod prng;
pub mod reductions;
pub mod solvers;
