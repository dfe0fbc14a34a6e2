//! Kraus channels and their convex decomposition into sampled unitary terms.
//!
//! A channel `E(ρ) = Σ_i K_i ρ K_i†` with Pauli expansions `K_i = Σ_j c_ij P_j`
//! becomes `Σ_i Σ_{jk} c_ij c_ik* P_j ρ P_k`. Normalizing by
//! `λ = Σ_i (Σ_j |c_ij|)²` turns that into a probability distribution over
//! diagonal terms `P_j ρ P_j` and cross terms `½(e^{iα} P_j ρ P_k + h.c.)`,
//! each estimated with weight `λ`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix};
use crate::error::{Result, ScuError};
use crate::pauli::{PauliString, PauliSum};
use crate::sim::{Gate, GateSequence};

/// Absolute tolerance on the Pauli coefficients of `Σ K†K − I`.
pub const TP_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    n_qubits: usize,
    kraus_ops: Vec<PauliSum>,
}

impl KrausChannel {
    /// Validates qubit counts and trace preservation.
    pub fn new(kraus_ops: Vec<PauliSum>) -> Result<Self> {
        let ch = KrausChannel::new_unchecked(kraus_ops)?;
        ch.check_trace_preserving()?;
        Ok(ch)
    }

    /// Checks only that the operator list is non-empty and dimensionally consistent.
    pub fn new_unchecked(kraus_ops: Vec<PauliSum>) -> Result<Self> {
        let first = kraus_ops.first().ok_or(ScuError::EmptyChannel)?;
        let n_qubits = first.n_qubits();
        if let Some(bad) = kraus_ops.iter().find(|k| k.n_qubits() != n_qubits) {
            return Err(ScuError::DimensionMismatch {
                left: n_qubits,
                right: bad.n_qubits(),
            });
        }
        Ok(KrausChannel {
            n_qubits,
            kraus_ops,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        KrausChannel {
            n_qubits,
            kraus_ops: vec![PauliSum::identity(n_qubits)],
        }
    }

    /// Single-qubit amplitude damping with
    /// `K₀ = ½(1+√(1−p)) I + ½(1−√(1−p)) Z` and `K₁ = (√p/2) X + (i√p/2) Y`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ScuError::InvalidParameter(format!(
                "damping strength must lie in [0, 1], got {p}"
            )));
        }
        let s = (1.0 - p).sqrt();
        let sp = p.sqrt();
        let pauli = |l: &str| -> PauliString { l.parse().expect("valid letter") };
        let k0 = PauliSum::from_terms(
            1,
            [
                (Complex64::new(0.5 * (1.0 + s), 0.0), pauli("I")),
                (Complex64::new(0.5 * (1.0 - s), 0.0), pauli("Z")),
            ],
        )?;
        let mut ops = vec![k0];
        if sp > 0.0 {
            ops.push(PauliSum::from_terms(
                1,
                [
                    (Complex64::new(0.5 * sp, 0.0), pauli("X")),
                    (Complex64::new(0.0, 0.5 * sp), pauli("Y")),
                ],
            )?);
        }
        KrausChannel::new(ops)
    }

    /// Named presets: `amplitude_damping(p)` and `identity(n)`.
    pub fn preset(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, arg) = text
            .strip_suffix(')')
            .and_then(|s| s.split_once('('))
            .ok_or_else(|| ScuError::Parse(format!("preset '{text}' is not of the form name(arg)")))?;
        match name.trim() {
            "amplitude_damping" => {
                let p: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| ScuError::Parse(format!("bad damping strength '{arg}'")))?;
                KrausChannel::amplitude_damping(p)
            }
            "identity" => {
                let n: usize = arg
                    .trim()
                    .parse()
                    .map_err(|_| ScuError::Parse(format!("bad qubit count '{arg}'")))?;
                Ok(KrausChannel::identity(n))
            }
            other => Err(ScuError::Parse(format!("unknown channel preset '{other}'"))),
        }
    }

    /// Pauli-decomposes dense Kraus matrices (registers of at most four qubits).
    pub fn from_dense(kraus: &[CMatrix]) -> Result<Self> {
        if let Some(k) = kraus.first() {
            let n = k.nrows().trailing_zeros() as usize;
            if n > 4 {
                return Err(ScuError::OversizeDense { max: 4, got: n });
            }
        }
        let ops = kraus
            .iter()
            .map(dense::pauli_decompose)
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kraus_ops(&self) -> &[PauliSum] {
        &self.kraus_ops
    }

    /// Largest coefficient magnitude of `Σ K†K − I`.
    pub fn trace_preservation_deviation(&self) -> Result<f64> {
        let mut acc = PauliSum::zero(self.n_qubits);
        for k in &self.kraus_ops {
            acc.axpy_raw(Complex64::new(1.0, 0.0), &k.adjoint().mul(k)?);
        }
        acc.axpy_raw(Complex64::new(-1.0, 0.0), &PauliSum::identity(self.n_qubits));
        Ok(acc.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max))
    }

    pub fn check_trace_preserving(&self) -> Result<()> {
        let deviation = self.trace_preservation_deviation()?;
        if deviation > TP_TOLERANCE {
            return Err(ScuError::NotTracePreserving { deviation });
        }
        Ok(())
    }

    /// Kraus operators as text blocks separated by `---` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, k) in self.kraus_ops.iter().enumerate() {
            if i > 0 {
                out.push_str("---\n");
            }
            let _ = write!(out, "{}", k.to_text());
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut blocks = vec![String::new()];
        for line in text.lines() {
            if line.trim() == "---" {
                blocks.push(String::new());
            } else {
                let b = blocks.last_mut().expect("non-empty");
                b.push_str(line);
                b.push('\n');
            }
        }
        let ops = blocks
            .iter()
            .filter(|b| b.lines().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()))
            .map(|b| PauliSum::parse_text(b))
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalTerm {
    pub unitary: PauliString,
    pub prob: f64,
    pub kraus_index: usize,
}

/// `½(e^{iα} U_left ρ U_right† + h.c.)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub left: PauliString,
    pub right: PauliString,
    pub alpha: f64,
    pub prob: f64,
    pub kraus_index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TermRef<'a> {
    Diagonal(&'a DiagonalTerm),
    Cross(&'a CrossTerm),
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexUnitaryDecomposition {
    pub n_qubits: usize,
    pub lambda: f64,
    pub diagonal_terms: Vec<DiagonalTerm>,
    pub cross_terms: Vec<CrossTerm>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl ConvexUnitaryDecomposition {
    pub fn n_terms(&self) -> usize {
        self.diagonal_terms.len() + self.cross_terms.len()
    }

    /// Term `i` in sampling order (diagonal terms first).
    pub fn term(&self, i: usize) -> TermRef<'_> {
        let nd = self.diagonal_terms.len();
        if i < nd {
            TermRef::Diagonal(&self.diagonal_terms[i])
        } else {
            TermRef::Cross(&self.cross_terms[i - nd])
        }
    }

    pub fn term_prob(&self, i: usize) -> f64 {
        match self.term(i) {
            TermRef::Diagonal(d) => d.prob,
            TermRef::Cross(c) => c.prob,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = TermRef<'_>> {
        (0..self.n_terms()).map(move |i| self.term(i))
    }

    /// Draws a term index with its stated probability.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.n_terms() - 1)
    }

    /// `Σ_terms λ·p·term(ρ)` on a dense density matrix; equals the channel output.
    pub fn apply_dense(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for t in self.terms() {
            match t {
                TermRef::Diagonal(term) => {
                    let u = dense::pauli_matrix(&term.unitary)?;
                    out += (&u * rho * u.adjoint()) * Complex64::new(self.lambda * term.prob, 0.0);
                }
                TermRef::Cross(term) => {
                    let ul = dense::pauli_matrix(&term.left)?;
                    let ur = dense::pauli_matrix(&term.right)?;
                    let a = (&ul * rho * ur.adjoint()) * Complex64::from_polar(1.0, term.alpha);
                    let sym = &a + a.adjoint();
                    out += sym * Complex64::new(0.5 * self.lambda * term.prob, 0.0);
                }
            }
        }
        Ok(out)
    }
}

/// Splits every Kraus operator into Pauli terms and normalizes the pairwise coefficient products.
pub fn convex_decompose(channel: &KrausChannel) -> Result<ConvexUnitaryDecomposition> {
    channel.check_trace_preserving()?;
    let mut lambda = 0.0;
    for k in channel.kraus_ops() {
        lambda += k.l1_norm().powi(2);
    }
    let mut diagonal_terms = Vec::new();
    let mut cross_terms = Vec::new();
    for (ki, k) in channel.kraus_ops().iter().enumerate() {
        // Zero coefficients never reach here: PauliSum prunes them.
        let terms: Vec<(&PauliString, &Complex64)> = k.iter().collect();
        for (p, c) in &terms {
            diagonal_terms.push(DiagonalTerm {
                unitary: (*p).clone(),
                prob: c.norm_sqr() / lambda,
                kraus_index: ki,
            });
        }
        for j in 0..terms.len() {
            for l in j + 1..terms.len() {
                let (pj, cj) = terms[j];
                let (pl, cl) = terms[l];
                let prod = cj * cl.conj();
                cross_terms.push(CrossTerm {
                    left: pj.clone(),
                    right: pl.clone(),
                    alpha: prod.arg(),
                    prob: 2.0 * prod.norm() / lambda,
                    kraus_index: ki,
                });
            }
        }
    }
    let mut cumulative = Vec::with_capacity(diagonal_terms.len() + cross_terms.len());
    let mut acc = 0.0;
    for p in diagonal_terms
        .iter()
        .map(|d| d.prob)
        .chain(cross_terms.iter().map(|c| c.prob))
    {
        acc += p;
        cumulative.push(acc);
    }
    if (acc - 1.0).abs() > 1e-10 {
        return Err(ScuError::ProbabilitySum(acc));
    }
    Ok(ConvexUnitaryDecomposition {
        n_qubits: channel.n_qubits(),
        lambda,
        diagonal_terms,
        cross_terms,
        cumulative,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Diagonal,
    Cross,
}

/// One sampled term as executable circuits; `weight` multiplies the measured value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledTerm {
    pub kind: TermKind,
    pub gates_left: GateSequence,
    pub gates_right: GateSequence,
    pub phase: f64,
    pub weight: f64,
}

impl SampledTerm {
    pub fn from_term(term: TermRef<'_>, weight: f64) -> Self {
        match term {
            TermRef::Diagonal(d) => {
                let g = GateSequence::from(vec![Gate::Pauli {
                    pauli: d.unitary.clone(),
                }]);
                SampledTerm {
                    kind: TermKind::Diagonal,
                    gates_left: g.clone(),
                    gates_right: g,
                    phase: 0.0,
                    weight,
                }
            }
            TermRef::Cross(c) => SampledTerm {
                kind: TermKind::Cross,
                gates_left: GateSequence::from(vec![Gate::Pauli {
                    pauli: c.left.clone(),
                }]),
                gates_right: GateSequence::from(vec![Gate::Pauli {
                    pauli: c.right.clone(),
                }]),
                phase: c.alpha,
                weight,
            },
        }
    }
}

pub fn sample_term<R: Rng + ?Sized>(decomp: &ConvexUnitaryDecomposition, rng: &mut R) -> SampledTerm {
    let i = decomp.sample_index(rng);
    SampledTerm::from_term(decomp.term(i), decomp.lambda)
}

/// `(λ, M*)`: the decomposition norm and the largest per-Kraus Pauli term count, with `λ ≤ M*`.
pub fn lambda_term_bound(channel: &KrausChannel) -> Result<(f64, f64)> {
    let decomp = convex_decompose(channel)?;
    let bound = channel
        .kraus_ops()
        .iter()
        .map(|k| k.len())
        .max()
        .unwrap_or(0) as f64;
    Ok((decomp.lambda, bound))
}
