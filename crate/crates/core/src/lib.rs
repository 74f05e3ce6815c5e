#![no_std]
extern crate alloc;

pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod noether;
pub mod numdiff;
pub mod quadrature;
pub mod sampling;
pub mod symmetry;
pub mod systems;

pub use error::{Error, Result};
