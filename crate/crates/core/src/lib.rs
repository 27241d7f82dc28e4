//! Decorated-cycle statistics for correlated spiked matrix models.
//!
//! The crate samples correlated spiked Wigner and Wishart pairs, enumerates
//! decorated cycle and path families, evaluates their color-coded subgraph
//! sums with layered dynamic programs, and provides the threshold calculus,
//! spectral baselines and low-degree advantage evaluators that go with them.

pub mod baselines;
pub mod counting;
pub mod detection;
pub mod error;
pub mod graphfam;
pub mod lowdeg;
pub mod models;
pub mod prior;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
