//! State-vector simulation of gate sequences and the sampled-term estimators.

mod estimator;
mod gate;
mod state;

pub use estimator::{
    cross_term_circuit, cross_term_expectation, dense_expectation, exact_channel_apply, scu_estimate,
    scu_exact_expectation, term_expectation, EstimatorResult,
};
pub use gate::{Gate, GateSequence};
pub use state::{sequence_unitary, StateVector, MAX_STATE_QUBITS};
