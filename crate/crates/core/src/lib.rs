//! Effective Hamiltonians for multilevel quantum systems with off-resonant
//! intermediate states, beyond plain adiabatic elimination.

pub mod cli;
pub mod dynamics;
pub mod elimination;
pub mod error;
pub mod model;
pub mod numkernel;
pub mod picture;

pub use error::{Error, Result};
