//! Layered sampling of operator products.
//!
//! A product `c·A₁^{k₁}A₂^{k₂}⋯` is sampled by expanding each factor power on its
//! own, drawing one Pauli term per layer with probability `|a|/|A^k|₁`, and
//! multiplying the draws. The weight is `|c|·∏|A_i^{k_i}|₁`, which is never smaller
//! than the L₁ norm of the fully expanded product but needs only the per-layer
//! expansions.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, ScuError};
use crate::pauli::{PauliString, PauliSum};

/// Largest factor power expanded in one layer.
pub const MAX_LAYER_POWER: u32 = 4;

/// One sampled operator `weight · phase · pauli`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovDraw {
    pub pauli: PauliString,
    pub phase: Complex64,
    pub weight: f64,
}

impl MarkovDraw {
    /// `phase · pauli` with the string phase folded in.
    pub fn unit_operator(&self) -> (PauliString, Complex64) {
        (self.pauli.unphased(), self.phase * self.pauli.phase_factor())
    }
}

#[derive(Clone, Debug)]
struct Layer {
    terms: Vec<(PauliString, Complex64)>,
    cumulative: Vec<f64>,
    l1: f64,
}

impl Layer {
    fn new(sum: &PauliSum) -> Self {
        let terms: Vec<(PauliString, Complex64)> = sum.iter().map(|(p, c)| (p.clone(), *c)).collect();
        let mut acc = 0.0;
        let cumulative = terms
            .iter()
            .map(|(_, c)| {
                acc += c.norm();
                acc
            })
            .collect();
        Layer {
            terms,
            cumulative,
            l1: acc,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.l1;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.terms.len() - 1)
    }
}

fn unit(c: Complex64) -> Complex64 {
    c / c.norm()
}

#[derive(Clone, Debug)]
pub struct LayeredProduct {
    n_qubits: usize,
    scalar: Complex64,
    layers: Vec<Layer>,
}

impl LayeredProduct {
    pub fn new(scalar: Complex64, factors: &[(PauliSum, u32)]) -> Result<Self> {
        let n_qubits = factors
            .first()
            .map(|(a, _)| a.n_qubits())
            .ok_or_else(|| ScuError::InvalidParameter("layered product needs at least one factor".into()))?;
        let mut layers = Vec::with_capacity(factors.len());
        for (a, k) in factors {
            if *k > MAX_LAYER_POWER {
                return Err(ScuError::PowerTooLarge {
                    power: *k,
                    cap: MAX_LAYER_POWER,
                });
            }
            if a.n_qubits() != n_qubits {
                return Err(ScuError::DimensionMismatch {
                    left: n_qubits,
                    right: a.n_qubits(),
                });
            }
            let mut pw = PauliSum::identity(n_qubits);
            for _ in 0..*k {
                pw = pw.mul(a)?;
            }
            layers.push(Layer::new(&pw));
        }
        Ok(LayeredProduct {
            n_qubits,
            scalar,
            layers,
        })
    }

    /// `|c|·∏ |A_i^{k_i}|₁`.
    pub fn l1_weight(&self) -> f64 {
        self.scalar.norm() * self.layers.iter().map(|l| l.l1).product::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.norm() == 0.0 || self.layers.iter().any(|l| l.terms.is_empty())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MarkovDraw {
        let mut pauli = PauliString::identity(self.n_qubits);
        let mut phase = unit(self.scalar);
        for layer in &self.layers {
            let (p, c) = &layer.terms[layer.draw(rng)];
            pauli = pauli.mul_unchecked(p);
            phase *= unit(*c);
        }
        MarkovDraw {
            pauli,
            phase,
            weight: self.l1_weight(),
        }
    }

    /// The product itself, expanded term by term.
    pub fn exact_expansion(&self) -> Result<PauliSum> {
        let mut out = PauliSum::identity(self.n_qubits).scaled(self.scalar);
        for layer in &self.layers {
            let mut ls = PauliSum::zero(self.n_qubits);
            for (p, c) in &layer.terms {
                ls.add_term(p, *c);
            }
            out = out.mul(&ls)?;
        }
        Ok(out)
    }

    /// `Σ_draws prob(draw)·weight·phase·pauli`, enumerating every combination of layer draws.
    pub fn enumerate_draws(&self) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        let mut stack = vec![(0usize, PauliString::identity(self.n_qubits), unit(self.scalar), 1.0)];
        let w = self.l1_weight();
        while let Some((depth, p, ph, prob)) = stack.pop() {
            if depth == self.layers.len() {
                out.add_term(&p, ph * w * prob);
                continue;
            }
            let layer = &self.layers[depth];
            for (q, c) in &layer.terms {
                stack.push((depth + 1, p.mul_unchecked(q), ph * unit(*c), prob * c.norm() / layer.l1));
            }
        }
        out.prune();
        out
    }
}

/// Samples `∏ A_i^{k_i}` layer by layer; see [`LayeredProduct`].
pub fn markov_partition_sample<R: Rng + ?Sized>(factors: &[(PauliSum, u32)], rng: &mut R) -> Result<MarkovDraw> {
    Ok(LayeredProduct::new(Complex64::new(1.0, 0.0), factors)?.sample(rng))
}

/// Order-`k` part of an ordered exponential product `∏_f exp(−i w_f τ P_f)` (coefficient of `τ^k`).
///
/// Draws `k` factor indices i.i.d. with probability `|w_f|/W`, multiplies the drawn
/// `−i·sign(w_f)·P_f` in factor order, and weights by `W^k/k!`; the expectation is
/// the exact order-`k` coefficient.
#[derive(Clone, Debug)]
pub struct ProductOrderSampler {
    n_qubits: usize,
    factors: Vec<(PauliString, f64)>,
    order: u32,
    scalar: Complex64,
    total: f64,
    cumulative: Vec<f64>,
}

impl ProductOrderSampler {
    pub fn new(n_qubits: usize, factors: &[(PauliString, f64)], order: u32, scalar: Complex64) -> Self {
        let mut acc = 0.0;
        let cumulative = factors
            .iter()
            .map(|(_, w)| {
                acc += w.abs();
                acc
            })
            .collect();
        ProductOrderSampler {
            n_qubits,
            factors: factors.to_vec(),
            order,
            scalar,
            total: acc,
            cumulative,
        }
    }

    /// `|c|·W^k/k!`.
    pub fn l1_weight(&self) -> f64 {
        let mut w = self.scalar.norm();
        for l in 1..=self.order {
            w *= self.total / l as f64;
        }
        w
    }

    fn value(&self, mut idx: Vec<usize>) -> (PauliString, Complex64) {
        idx.sort_unstable();
        let mut p = PauliString::identity(self.n_qubits);
        let mut ph = unit(self.scalar);
        for i in idx {
            let (q, w) = &self.factors[i];
            p = p.mul_unchecked(q);
            ph *= Complex64::new(0.0, -w.signum());
        }
        (p, ph)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MarkovDraw {
        let idx = (0..self.order)
            .map(|_| {
                let u = rng.random::<f64>() * self.total;
                self.cumulative
                    .partition_point(|&c| c <= u)
                    .min(self.factors.len() - 1)
            })
            .collect();
        let (pauli, phase) = self.value(idx);
        MarkovDraw {
            pauli,
            phase,
            weight: self.l1_weight(),
        }
    }

    /// Exhaustive expectation over all `F^k` index sequences.
    pub fn enumerate_draws(&self) -> PauliSum {
        let f = self.factors.len();
        let k = self.order as usize;
        let mut out = PauliSum::zero(self.n_qubits);
        let w = self.l1_weight();
        for code in 0..f.pow(k as u32) {
            let mut c = code;
            let mut idx = Vec::with_capacity(k);
            let mut prob = 1.0;
            for _ in 0..k {
                idx.push(c % f);
                prob *= self.factors[c % f].1.abs() / self.total;
                c /= f;
            }
            let (p, ph) = self.value(idx);
            out.add_term(&p, ph * w * prob);
        }
        out.prune();
        out
    }
}
