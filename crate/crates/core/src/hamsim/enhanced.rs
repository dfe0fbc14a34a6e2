//! Product formulas with stochastically implemented remainder corrections.
//!
//! One step applies `S_p(τ) + R(τ)` where `R` collects the Taylor coefficients of
//! `exp(−iHτ) − S_p(τ)` beyond order `p`. Orders up to `M` are expanded in full;
//! optional higher orders are sampled layer by layer (see [`super::markov`]).
//! With `μ = 1 + |R(τ)|₁` the step is `μ(p₀ S_p + Σ_k p_k e^{iφ_k} P_k)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::cts::{SimulationSchedule, StepDraw, StepPair};
use super::markov::{LayeredProduct, MarkovDraw, ProductOrderSampler};
use super::product::RemainderSeries;
use super::steps::{smallest_steps, steps_for_tail_error};
use crate::error::{Result, ScuError};
use crate::pauli::{i_pow, PauliString, PauliSum};
use crate::rng::stream;
use crate::sim::{Gate, GateSequence};

#[derive(Clone, Debug)]
enum LayerSampler {
    /// `(−i)^k/k! · H^{⌈k/2⌉} H^{⌊k/2⌋}`.
    Exponential(LayeredProduct),
    /// `−S_k`.
    Formula(ProductOrderSampler),
}

#[derive(Clone, Debug)]
struct LayerTerm {
    order: u32,
    sampler: LayerSampler,
    weight: f64,
}

impl LayerTerm {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MarkovDraw {
        match &self.sampler {
            LayerSampler::Exponential(s) => s.sample(rng),
            LayerSampler::Formula(s) => s.sample(rng),
        }
    }
}

/// Precomputed remainder expansion and layered samplers, reusable across step sizes.
#[derive(Clone, Debug)]
pub struct EnhancedModel {
    remainder: RemainderSeries,
    layered_order: u32,
    layers: Arc<Vec<LayerTerm>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correction {
    pub pauli: PauliString,
    pub phase: f64,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnhancedDraw {
    Base,
    Correction { pauli: PauliString, phase: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct EnhancedPfDecomposition {
    pub order: u32,
    pub t_step: f64,
    pub max_order: u32,
    pub layered_order: u32,
    pub base_formula: GateSequence,
    pub p0: f64,
    pub mu: f64,
    pub corrections: Vec<Correction>,
    /// `(order, probability)` of each layered block.
    pub layer_probs: Vec<(u32, f64)>,
    #[serde(skip)]
    layers: Arc<Vec<LayerTerm>>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl EnhancedModel {
    /// Full expansion through order `max_order`, layered sampling for orders up to `layered_order`.
    pub fn new(h: &PauliSum, order: u32, max_order: u32, layered_order: u32) -> Result<Self> {
        let remainder = RemainderSeries::new(h, order, max_order)?;
        if layered_order < max_order {
            return Err(ScuError::InvalidOrder {
                min: max_order,
                got: layered_order,
            });
        }
        let n = h.n_qubits();
        let mut layers = Vec::new();
        let mut fact = 1.0;
        for k in 1..=layered_order {
            fact *= k as f64;
            if k <= max_order {
                continue;
            }
            let exp = LayeredProduct::new(
                i_pow(-(k as i64)) / fact,
                &[(h.clone(), k.div_ceil(2)), (h.clone(), k / 2)],
            )?;
            let formula = ProductOrderSampler::new(n, remainder.formula().factors(), k, Complex64::new(-1.0, 0.0));
            for sampler in [LayerSampler::Exponential(exp), LayerSampler::Formula(formula)] {
                let weight = match &sampler {
                    LayerSampler::Exponential(s) => s.l1_weight(),
                    LayerSampler::Formula(s) => s.l1_weight(),
                };
                if weight > 0.0 {
                    layers.push(LayerTerm {
                        order: k,
                        sampler,
                        weight,
                    });
                }
            }
        }
        Ok(EnhancedModel {
            remainder,
            layered_order,
            layers: Arc::new(layers),
        })
    }

    pub fn remainder(&self) -> &RemainderSeries {
        &self.remainder
    }

    pub fn order(&self) -> u32 {
        self.remainder.order()
    }

    /// Highest order handled by the corrections, expanded or layered.
    pub fn layered_order(&self) -> u32 {
        self.layered_order
    }

    fn layer_weight(&self, tau: f64) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weight * tau.abs().powi(l.order as i32))
            .sum()
    }

    /// `1 + |R(τ)|₁` plus the layered weights.
    pub fn mu(&self, tau: f64) -> f64 {
        1.0 + self.remainder.evaluate(tau).l1_norm() + self.layer_weight(tau)
    }

    pub fn lambda(&self, t: f64, r: u64) -> f64 {
        (2.0 * r as f64 * self.mu(t / r as f64).ln()).exp()
    }

    /// Smallest `r` with `r · 2·tail(|H|₁t/r, K)`, `K` the highest corrected order.
    pub fn steps_for_error(&self, t: f64, epsilon: f64) -> Result<u64> {
        steps_for_tail_error(self.remainder.h_l1() * t.abs(), self.layered_order, epsilon, 2.0)
    }

    /// Smallest `r` with `μ(t/r)^{2r} ≤ λ_max`.
    pub fn steps_for_overhead(&self, t: f64, lambda_max: f64) -> Result<u64> {
        if lambda_max <= 1.0 || lambda_max.is_nan() {
            return Err(ScuError::InvalidParameter(format!(
                "overhead bound must exceed 1, got {lambda_max}"
            )));
        }
        let cap = lambda_max.ln();
        smallest_steps(|r| 2.0 * r as f64 * self.mu(t / r as f64).ln() <= cap)
    }

    pub fn decompose(&self, tau: f64) -> Result<EnhancedPfDecomposition> {
        let rem = self.remainder.evaluate(tau);
        let layer_w: Vec<f64> = self
            .layers
            .iter()
            .map(|l| l.weight * tau.abs().powi(l.order as i32))
            .collect();
        let mu = 1.0 + rem.l1_norm() + layer_w.iter().sum::<f64>();
        let corrections: Vec<Correction> = rem
            .iter()
            .map(|(p, c)| Correction {
                pauli: p.clone(),
                phase: c.arg(),
                prob: c.norm() / mu,
            })
            .collect();
        let layer_probs: Vec<(u32, f64)> = self
            .layers
            .iter()
            .zip(&layer_w)
            .map(|(l, w)| (l.order, w / mu))
            .collect();
        let p0 = 1.0 / mu;
        let mut acc = p0;
        let mut cumulative = vec![acc];
        for p in corrections.iter().map(|c| c.prob).chain(layer_probs.iter().map(|l| l.1)) {
            acc += p;
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > 1e-10 {
            return Err(ScuError::ProbabilitySum(acc));
        }
        Ok(EnhancedPfDecomposition {
            order: self.order(),
            t_step: tau,
            max_order: self.remainder.max_order(),
            layered_order: self.layered_order,
            base_formula: self.remainder.formula().gates(tau),
            p0,
            mu,
            corrections,
            layer_probs,
            layers: Arc::clone(&self.layers),
            cumulative,
        })
    }
}

pub fn enhanced_pf_decompose(h: &PauliSum, t: f64, order: u32, max_order: u32) -> Result<EnhancedPfDecomposition> {
    EnhancedModel::new(h, order, max_order, max_order)?.decompose(t)
}

impl EnhancedPfDecomposition {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EnhancedDraw {
        let u = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        if i == 0 {
            return EnhancedDraw::Base;
        }
        if i <= self.corrections.len() {
            let c = &self.corrections[i - 1];
            return EnhancedDraw::Correction {
                pauli: c.pauli.clone(),
                phase: c.phase,
            };
        }
        let layer = &self.layers[i - 1 - self.corrections.len()];
        let (pauli, mut phase) = layer.sample(rng).unit_operator();
        if self.t_step < 0.0 && layer.order % 2 == 1 {
            phase = -phase;
        }
        EnhancedDraw::Correction {
            pauli,
            phase: phase.arg(),
        }
    }

    /// Draw as a left step factor.
    pub fn left_step(&self, draw: &EnhancedDraw) -> StepDraw {
        match draw {
            EnhancedDraw::Base => StepDraw {
                gates: self.base_formula.clone(),
                phase: 0.0,
            },
            EnhancedDraw::Correction { pauli, phase } => StepDraw {
                gates: GateSequence::from(vec![Gate::Pauli { pauli: pauli.clone() }]),
                phase: *phase,
            },
        }
    }

    /// Adjoint of the draw, as a right step factor.
    pub fn right_step(&self, draw: &EnhancedDraw) -> Result<StepDraw> {
        Ok(match draw {
            EnhancedDraw::Base => StepDraw {
                gates: self.base_formula.inverse()?,
                phase: 0.0,
            },
            EnhancedDraw::Correction { pauli, phase } => StepDraw {
                gates: GateSequence::from(vec![Gate::Pauli { pauli: pauli.clone() }]),
                phase: -phase,
            },
        })
    }

    /// `μ Σ_k p_k e^{iφ_k} P_k` over the fully expanded corrections.
    pub fn correction_operator(&self) -> PauliSum {
        let n = self.corrections.first().map(|c| c.pauli.n_qubits()).unwrap_or(0);
        let mut out = PauliSum::zero(n);
        for c in &self.corrections {
            out.add_term(&c.pauli, Complex64::from_polar(self.mu * c.prob, c.phase));
        }
        out.prune();
        out
    }
}

/// Left draws of `C_{S_p}(t/r)` and right draws of its adjoint, each step on its own streams.
pub fn enhanced_pf_schedule(model: &EnhancedModel, n_qubits: usize, t: f64, r: usize, seed: u64) -> Result<SimulationSchedule> {
    if r < 1 {
        return Err(ScuError::InvalidParameter("step count r must be at least 1".into()));
    }
    let d = model.decompose(t / r as f64)?;
    let steps = (0..r)
        .map(|i| {
            let mut lr = stream(seed, 2 * i as u64);
            let mut rr = stream(seed, 2 * i as u64 + 1);
            Ok(StepPair {
                step: i,
                left: d.left_step(&d.sample(&mut lr)),
                right: d.right_step(&d.sample(&mut rr))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationSchedule {
        algorithm: format!("pf{}_enhanced", model.order()),
        n_qubits,
        t,
        r,
        order: model.layered_order(),
        lambda: d.mu.powi(2 * r as i32),
        seed,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_hamiltonian_needs_no_corrections() {
        let h = PauliSum::from_real(&[(1.0, "ZZ"), (0.5, "ZI")]);
        let d = enhanced_pf_decompose(&h, 0.3, 1, 3).unwrap();
        assert_eq!(d.mu, 1.0);
        assert_eq!(d.p0, 1.0);
        assert!(d.corrections.is_empty());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let h = PauliSum::from_real(&[(1.0, "X"), (0.7, "Z")]);
        let d = enhanced_pf_decompose(&h, 0.1, 1, 3).unwrap();
        let total = d.p0 + d.corrections.iter().map(|c| c.prob).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.mu >= 1.0);
        assert!(enhanced_pf_decompose(&h, 0.1, 1, 1).is_err());
        assert!(enhanced_pf_decompose(&h, 0.1, 3, 4).is_err());
    }

    #[test]
    fn layered_blocks_enumerate_to_remainder_coefficients() {
        let h = PauliSum::from_real(&[(0.9, "ZZ"), (-0.4, "XI"), (0.3, "IY")]);
        let model = EnhancedModel::new(&h, 2, 3, 5).unwrap();
        let full = RemainderSeries::new(&h, 2, 5).unwrap();
        for k in 4..=5 {
            let mut got = PauliSum::zero(2);
            for l in model.layers.iter().filter(|l| l.order == k) {
                let e = match &l.sampler {
                    LayerSampler::Exponential(s) => s.enumerate_draws(),
                    LayerSampler::Formula(s) => s.enumerate_draws(),
                };
                got = got.add(&e).unwrap();
            }
            let diff = got.sub(full.coefficient(k)).unwrap().l1_norm();
            assert!(diff < 1e-12, "order {k}: {diff}");
        }
    }

    #[test]
    fn layered_orders_add_weight() {
        let h = PauliSum::from_real(&[(1.0, "ZZ"), (0.5, "XI"), (0.5, "IX")]);
        let plain = EnhancedModel::new(&h, 2, 4, 4).unwrap();
        let layered = EnhancedModel::new(&h, 2, 4, 7).unwrap();
        assert!(layered.mu(0.1) > plain.mu(0.1));
        let d = layered.decompose(0.1).unwrap();
        let total = d.p0 + d.corrections.iter().map(|c| c.prob).sum::<f64>() + d.layer_probs.iter().map(|l| l.1).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
        let mut rng = stream(1, 1);
        for _ in 0..100 {
            if let EnhancedDraw::Correction { pauli, .. } = d.sample(&mut rng) {
                assert_eq!(pauli.phase_exp(), 0);
            }
        }
    }
}
