//! Belief propagation decoding of quantum LDPC codes with degeneracy cutting,
//! together with code constructors, detector error models and a Monte Carlo
//! harness.

pub mod bp;
pub mod codes;
pub mod detmodel;
pub mod error;
pub mod gf2;
pub mod noise;
pub mod postproc;
pub mod sim;

pub use error::{Error, Result};
