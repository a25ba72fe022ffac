//! Finite-precision structure theory for uniform pro-p groups: exact
//! arithmetic in Z/p^k, powerful Zp-Lie algebras with bracket tables, the
//! log/exp bridge between the two, a theta-abelian orientation classifier,
//! and closed-form Fp-cohomology profiles with quadraticity checking.

pub mod error;
pub mod padic;
pub mod zlin;
pub mod fp;
pub mod lie;
pub mod group;

pub use error::{Error, Result};
pub use padic::{exp_p, log_p, unit_inverse, PadicRing, PadicScalar, PadicUnit, Valuation};
