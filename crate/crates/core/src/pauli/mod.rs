//! Pauli strings in symplectic form and sparse Pauli sums.

mod series;
mod string;
mod sum;

pub use series::{taylor_even_odd, PowerSeries};
pub use string::{pauli_mul, Pauli, PauliString};
pub use sum::{commutator, l1_norm, sum_mul, PauliSum, DROP_TOLERANCE};

pub(crate) use string::i_pow;
