//! Exact computational verification of weight-module identities for
//! GL2(F_q), q = p^2, together with the imaginary-quadratic class-number
//! inputs that drive them.

pub mod brauer;
pub mod cli;
pub mod error;
pub mod gf;
pub mod invariants;
pub mod linalg;
pub mod meataxe;
pub mod modrep;
pub mod morphisms;
pub mod quadfield;
pub mod report;

pub use error::{Error, Result};
