//! Learning anisotropic hyperelastic energy functionals with Sobolev training,
//! plus a continuum-mechanics audit suite for the learned models.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exec;
pub mod math;
pub mod data;
pub mod energy;
pub mod tensor;
pub mod train;
pub mod validate;

pub use error::{Error, Result};
