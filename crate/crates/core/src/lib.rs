//! Stochastic combinations of unitaries: Pauli algebra, channel decompositions,
//! sampled-term circuit estimators, multiple-quantum-coherence experiments, and
//! randomized Hamiltonian-simulation compilers with resource estimates.

pub mod channel;
pub mod dense;
pub mod error;
pub mod ghz;
pub mod hamsim;
pub mod pauli;
pub mod resources;
pub mod rng;
pub mod sim;

pub use error::{Result, ScuError};
