//! Randomized Hamiltonian-simulation compilers: convex Taylor sampling and
//! product formulas with sampled remainder corrections.

mod cts;
mod enhanced;
mod markov;
mod product;
mod steps;

pub use cts::{
    cts_decompose, cts_schedule, cts_steps_for_error, cts_steps_for_overhead, CtsDecomposition, CtsDraw, CtsModel,
    SimulationSchedule, StepDraw, StepPair,
};
pub use enhanced::{
    enhanced_pf_decompose, enhanced_pf_schedule, Correction, EnhancedDraw, EnhancedModel, EnhancedPfDecomposition,
};
pub use markov::{markov_partition_sample, LayeredProduct, MarkovDraw, ProductOrderSampler, MAX_LAYER_POWER};
pub use product::{pf_remainder, product_formula, ProductFormula, RemainderSeries};
pub use steps::{smallest_steps, steps_for_tail_error, taylor_tail, MAX_STEPS};
