use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScuError {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max imaginary coefficient {max_imag:e})")]
    NotHermitian { max_imag: f64 },

    #[error("truncation order must be at least {min}, got {got}")]
    InvalidOrder { min: u32, got: u32 },

    #[error("channel is not trace preserving (deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    #[error("qubit index {index} out of range for a {size}-qubit register")]
    QubitOutOfRange { index: usize, size: usize },

    #[error("dense representation limited to {max} qubits, got {got}")]
    OversizeDense { max: usize, got: usize },

    #[error("gate {0} has no controlled form in the simulator gate set")]
    UnsupportedControlled(String),

    #[error("gate {0} is not invertible")]
    NotInvertible(String),

    #[error("theta grid has {points} points but coherence order {order} needs at least {needed}")]
    InsufficientGrid { points: usize, order: usize, needed: usize },

    #[error("unsupported product formula order {0} (supported: 1, 2)")]
    UnsupportedOrder(u32),

    #[error("factor power {power} exceeds the expansion cap {cap}")]
    PowerTooLarge { power: u32, cap: u32 },

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ScuError>;
