//! Exact ℓ-adic lattice algebra: fixed-precision arithmetic in towers of
//! local rings, lattices over their valuation rings with Smith/Hermite
//! reduction, representations of small structured groups, perfect-pairing
//! construction and lattice stabilization, and finite-enumeration
//! obstruction oracles that emit machine-checkable certificates.

// index loops here usually walk several arrays in lockstep
#![allow(clippy::needless_range_loop)]

pub mod cert;
pub mod error;
pub mod groups;
pub mod lattice;
pub mod localring;
pub mod mat;
pub mod modp;
pub mod padic;
pub mod pairing;
pub mod poly;
pub mod reps;
pub mod rng;
pub mod sharpness;

pub use error::{Error, Result};
