use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateSequence};
use super::state::StateVector;
use crate::channel::{ConvexUnitaryDecomposition, KrausChannel, SampledTerm, TermKind, TermRef};
use crate::dense::{self, CMatrix};
use crate::error::{Result, ScuError};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng::{map_indexed, stream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub lambda: f64,
}

impl EstimatorResult {
    /// Mean and standard error of the mean of `values`.
    pub fn from_values(values: &[f64], lambda: f64) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n.max(1) as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        EstimatorResult {
            mean,
            std_error,
            n_samples: n,
            lambda,
        }
    }
}

/// `Re Σ_P c_P ⟨ψ|P|ψ⟩`, or the shot estimate of it: each Pauli term gets `shots`
/// Bernoulli draws of its ±1 outcome.
fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    terms: &[(PauliString, f64)],
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut acc = 0.0;
    for (p, c) in terms {
        if p.is_identity() {
            acc += c;
            continue;
        }
        let e = state.expectation_pauli(p)?.re;
        if shots == 0 {
            acc += c * e;
        } else {
            let plus = (0.5 * (1.0 + e)).clamp(0.0, 1.0);
            let hits = (0..shots).filter(|_| rng.random::<f64>() < plus).count();
            acc += c * (2.0 * hits as f64 / shots as f64 - 1.0);
        }
    }
    Ok(acc)
}

fn observable_terms(o: &PauliSum) -> Result<Vec<(PauliString, f64)>> {
    o.require_hermitian()?;
    Ok(o.iter().map(|(p, c)| (p.clone(), c.re)).collect())
}

/// Appends the ancilla interferometer: `|+⟩`, `V₁` controlled on 1, `V₂` controlled on 0, then `Phase(θ)`.
pub fn cross_term_circuit(v1: &GateSequence, v2: &GateSequence, theta: f64, ancilla: usize) -> Result<GateSequence> {
    let mut seq = GateSequence::new();
    seq.push(Gate::H { qubit: ancilla });
    seq.extend(&v1.controlled(ancilla)?);
    seq.push(Gate::X { qubit: ancilla });
    seq.extend(&v2.controlled(ancilla)?);
    seq.push(Gate::X { qubit: ancilla });
    seq.push(Gate::Phase {
        qubit: ancilla,
        angle: theta,
    });
    Ok(seq)
}

/// Estimates `Re Tr[O e^{iθ} V₁ ρ V₂†]` with `ρ` prepared by `prep` from `|0…0⟩`.
///
/// The ancilla is one qubit above the observable's register; the readout is
/// `X_a ⊗ O`. With `shots = 0` the exact expectation is returned.
pub fn cross_term_expectation<R: Rng + ?Sized>(
    v1: &GateSequence,
    v2: &GateSequence,
    theta: f64,
    prep: &GateSequence,
    observable: &PauliSum,
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = observable.n_qubits();
    let terms = observable_terms(observable)?;
    let mut state = StateVector::prepared(n + 1, prep)?;
    state.apply(&cross_term_circuit(v1, v2, theta, n)?)?;
    let xa = PauliString::single(n + 1, n, Pauli::X);
    let widened = terms
        .into_iter()
        .map(|(p, c)| Ok((p.widened(n + 1).mul(&xa)?, c)))
        .collect::<Result<Vec<_>>>()?;
    measure(&state, &widened, shots, rng)
}

/// Value of one sampled term, without the `λ` weight.
pub fn term_expectation<R: Rng + ?Sized>(
    term: &SampledTerm,
    prep: &GateSequence,
    observable: &PauliSum,
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    match term.kind {
        TermKind::Diagonal => {
            let terms = observable_terms(observable)?;
            let mut state = StateVector::prepared(observable.n_qubits(), prep)?;
            state.apply(&term.gates_left)?;
            measure(&state, &terms, shots, rng)
        }
        TermKind::Cross => cross_term_expectation(
            &term.gates_left,
            &term.gates_right,
            term.phase,
            prep,
            observable,
            shots,
            rng,
        ),
    }
}

/// Monte Carlo estimate of `Tr[O E(ρ)]`: each sample draws a term on its own
/// random stream, measures it with `shots_per_sample` shots per Pauli term
/// (`0` for exact values), and scales by `λ`.
pub fn scu_estimate(
    decomp: &ConvexUnitaryDecomposition,
    prep: &GateSequence,
    observable: &PauliSum,
    n_samples: usize,
    shots_per_sample: usize,
    seed: u64,
) -> Result<EstimatorResult> {
    if n_samples == 0 {
        return Err(ScuError::InvalidParameter("need at least one sample".into()));
    }
    if decomp.n_qubits != observable.n_qubits() {
        return Err(ScuError::DimensionMismatch {
            left: decomp.n_qubits,
            right: observable.n_qubits(),
        });
    }
    let values = map_indexed(n_samples, |i| {
        let mut rng = stream(seed, i as u64);
        let idx = decomp.sample_index(&mut rng);
        let term = SampledTerm::from_term(decomp.term(idx), decomp.lambda);
        term_expectation(&term, prep, observable, shots_per_sample, &mut rng).map(|v| v * term.weight)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EstimatorResult::from_values(&values, decomp.lambda))
}

/// `Σ_terms λ p ⟨term⟩`, every term evaluated exactly on the simulator.
pub fn scu_exact_expectation(
    decomp: &ConvexUnitaryDecomposition,
    prep: &GateSequence,
    observable: &PauliSum,
) -> Result<f64> {
    let mut rng = stream(0, 0);
    let mut acc = 0.0;
    for t in decomp.terms() {
        let prob = match t {
            TermRef::Diagonal(d) => d.prob,
            TermRef::Cross(c) => c.prob,
        };
        let term = SampledTerm::from_term(t, decomp.lambda);
        acc += decomp.lambda * prob * term_expectation(&term, prep, observable, 0, &mut rng)?;
    }
    Ok(acc)
}

/// Dense reference `Σ_i K_i ρ K_i†` for registers of at most three qubits.
pub fn exact_channel_apply(channel: &KrausChannel, rho: &CMatrix) -> Result<CMatrix> {
    let n = channel.n_qubits();
    if n > 3 {
        return Err(ScuError::OversizeDense { max: 3, got: n });
    }
    let d = 1 << n;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(ScuError::DimensionMismatch {
            left: d,
            right: rho.nrows(),
        });
    }
    let mut out = CMatrix::zeros(d, d);
    for k in channel.kraus_ops() {
        let km = dense::sum_matrix(k)?;
        out += &km * rho * km.adjoint();
    }
    Ok(out)
}

/// `Tr[O ρ]` for dense `ρ`.
pub fn dense_expectation(observable: &PauliSum, rho: &CMatrix) -> Result<f64> {
    let o = dense::sum_matrix(observable)?;
    let tr: Complex64 = (o * rho).trace();
    Ok(tr.re)
}
