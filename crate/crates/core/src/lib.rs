//! Exact formulas, samplers and explorers for domain-Markov half-planar
//! triangulations with parameter `alpha`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel fan-out live in the companion `peelab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod error;
pub mod explorer;
pub mod graph;
pub mod map;
pub mod percolation;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod walker;

pub use analytic::{ModelParams, Regime};
pub use error::{Error, Result};
pub use rng::RngStream;
