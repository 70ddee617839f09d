//! Exact computational toolkit for modular Lie theory: PBW arithmetic in
//! enveloping algebras, p-centers and their deformation Poisson structure,
//! and cotangent Lie algebras with their induced automorphisms.

pub mod center;
pub mod cli;
pub mod cotangent;
pub mod error;
pub mod files;
pub mod lie;
pub mod linalg;
pub mod pbw;
pub mod report;
pub mod sym;
pub mod scalar;

pub use error::{Error, Result};
