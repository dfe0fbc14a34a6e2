//! Convex Taylor sampling.
//!
//! The order-`M` Taylor truncation `I + even + i·odd` of `exp(−iHt)` is rewritten as
//! `L_c Σ_j p_j P′_j + √(1+L_s²) Σ_k p_k exp(iθP′_k)` with `θ = arccos(1/√(1+L_s²))`,
//! a positive combination of Pauli strings and Pauli rotations with total weight
//! `μ = L_c + √(1+L_s²)`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::steps::{smallest_steps, steps_for_tail_error};
use crate::error::{Result, ScuError};
use crate::pauli::{PauliString, PauliSum, PowerSeries};
use crate::rng::stream;
use crate::sim::{Gate, GateSequence};

#[derive(Clone, Debug, PartialEq)]
pub enum CtsDraw {
    /// A signed Pauli string `P′ = ±P`.
    Pauli(PauliString),
    /// `exp(iθP′)` for the signed string `P′`.
    Rotation(PauliString),
}

#[derive(Clone, Debug, Serialize)]
pub struct CtsDecomposition {
    pub t_step: f64,
    pub order: u32,
    pub l_c: f64,
    pub l_s: f64,
    pub theta: f64,
    pub mu: f64,
    pub pauli_dist: Vec<(PauliString, f64)>,
    pub rotation_dist: Vec<(PauliString, f64)>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

fn signed(p: &PauliString, c: Complex64) -> PauliString {
    if c.re < 0.0 {
        p.negated()
    } else {
        p.clone()
    }
}

impl CtsDecomposition {
    fn from_parts(t: f64, m: u32, n_qubits: usize, even: &PauliSum, odd: &PauliSum) -> Result<Self> {
        let l_c = even.l1_norm();
        let l_s = odd.l1_norm();
        let root = (1.0 + l_s * l_s).sqrt();
        let theta = (1.0 / root).acos();
        let mu = l_c + root;
        let pauli_dist: Vec<(PauliString, f64)> = even
            .iter()
            .map(|(p, c)| (signed(p, *c), c.norm() / mu))
            .collect();
        let rotation_dist: Vec<(PauliString, f64)> = if odd.is_empty() {
            vec![(PauliString::identity(n_qubits), 1.0 / mu)]
        } else {
            odd.iter()
                .map(|(p, c)| (signed(p, *c), root * (c.norm() / l_s) / mu))
                .collect()
        };
        let mut acc = 0.0;
        let cumulative: Vec<f64> = pauli_dist
            .iter()
            .chain(&rotation_dist)
            .map(|(_, w)| {
                acc += w;
                acc
            })
            .collect();
        if (acc - 1.0).abs() > 1e-10 {
            return Err(ScuError::ProbabilitySum(acc));
        }
        Ok(CtsDecomposition {
            t_step: t,
            order: m,
            l_c,
            l_s,
            theta,
            mu,
            pauli_dist,
            rotation_dist,
            cumulative,
        })
    }

    pub fn n_outcomes(&self) -> usize {
        self.pauli_dist.len() + self.rotation_dist.len()
    }

    /// Outcome `i` with its probability (Pauli strings first).
    pub fn outcome(&self, i: usize) -> (CtsDraw, f64) {
        let np = self.pauli_dist.len();
        if i < np {
            let (p, w) = &self.pauli_dist[i];
            (CtsDraw::Pauli(p.clone()), *w)
        } else {
            let (p, w) = &self.rotation_dist[i - np];
            (CtsDraw::Rotation(p.clone()), *w)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CtsDraw {
        let u = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.n_outcomes() - 1);
        self.outcome(i).0
    }

    pub fn draw_gates(&self, draw: &CtsDraw) -> GateSequence {
        match draw {
            CtsDraw::Pauli(p) => GateSequence::from(vec![Gate::Pauli { pauli: p.clone() }]),
            CtsDraw::Rotation(p) => {
                // exp(iθ·sP) = exp(−i(−2θs)P/2)
                let s = if p.phase_exp() == 2 { -1.0 } else { 1.0 };
                GateSequence::from(vec![Gate::PauliRotation {
                    pauli: p.unphased(),
                    angle: -2.0 * self.theta * s,
                }])
            }
        }
    }

    /// The drawn operator as a Pauli sum.
    pub fn draw_operator(&self, draw: &CtsDraw) -> PauliSum {
        match draw {
            CtsDraw::Pauli(p) => PauliSum::from_string(p, Complex64::new(1.0, 0.0)),
            CtsDraw::Rotation(p) => {
                let mut s = PauliSum::identity(p.n_qubits()).scaled_real(self.theta.cos());
                s.add_term(p, Complex64::new(0.0, self.theta.sin()));
                s.prune();
                s
            }
        }
    }

    /// `μ·E[draw]`, which equals the order-`M` Taylor truncation.
    pub fn reconstruct(&self) -> PauliSum {
        let n = self
            .pauli_dist
            .first()
            .or(self.rotation_dist.first())
            .map(|(p, _)| p.n_qubits())
            .unwrap_or(0);
        let mut out = PauliSum::zero(n);
        for i in 0..self.n_outcomes() {
            let (d, w) = self.outcome(i);
            out = out.add(&self.draw_operator(&d).scaled_real(self.mu * w)).expect("same register");
        }
        out
    }
}

pub fn cts_decompose(h: &PauliSum, t: f64, m: u32) -> Result<CtsDecomposition> {
    CtsModel::new(h, m)?.decompose(t)
}

/// Cached powers of `H` for repeated decompositions at different step sizes.
#[derive(Clone, Debug)]
pub struct CtsModel {
    series: PowerSeries,
    order: u32,
    h_l1: f64,
}

impl CtsModel {
    pub fn new(h: &PauliSum, m: u32) -> Result<Self> {
        if m < 1 {
            return Err(ScuError::InvalidOrder { min: 1, got: m });
        }
        Ok(CtsModel {
            series: PowerSeries::new(h, m)?,
            order: m,
            h_l1: h.l1_norm(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn h_l1(&self) -> f64 {
        self.h_l1
    }

    pub fn decompose(&self, t: f64) -> Result<CtsDecomposition> {
        let (even, odd) = self.series.even_odd(t, self.order)?;
        CtsDecomposition::from_parts(t, self.order, self.series.n_qubits(), &even, &odd)
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        let (even, odd) = self.series.even_odd(t, self.order)?;
        let l_s = odd.l1_norm();
        Ok(even.l1_norm() + (1.0 + l_s * l_s).sqrt())
    }

    /// `μ(t/r)^{2r}`.
    pub fn lambda(&self, t: f64, r: u64) -> Result<f64> {
        Ok(self.ln_lambda(t, r)?.exp())
    }

    fn ln_lambda(&self, t: f64, r: u64) -> Result<f64> {
        Ok(2.0 * r as f64 * self.mu(t / r as f64)?.ln())
    }

    /// Smallest `r` with `r · tail(|H|₁t/r, M) ≤ ε`.
    pub fn steps_for_error(&self, t: f64, epsilon: f64) -> Result<u64> {
        steps_for_tail_error(self.h_l1 * t.abs(), self.order, epsilon, 1.0)
    }

    /// Smallest `r` with `μ(t/r)^{2r} ≤ λ_max`.
    pub fn steps_for_overhead(&self, t: f64, lambda_max: f64) -> Result<u64> {
        if lambda_max <= 1.0 || lambda_max.is_nan() {
            return Err(ScuError::InvalidParameter(format!(
                "overhead bound must exceed 1, got {lambda_max}"
            )));
        }
        let cap = lambda_max.ln();
        smallest_steps(|r| self.ln_lambda(t, r).map(|l| l <= cap).unwrap_or(false))
    }
}

pub fn cts_steps_for_error(h: &PauliSum, t: f64, m: u32, epsilon: f64) -> Result<u64> {
    steps_for_tail_error(h.l1_norm() * t.abs(), m, epsilon, 1.0)
}

pub fn cts_steps_for_overhead(h: &PauliSum, t: f64, m: u32, lambda_max: f64) -> Result<u64> {
    CtsModel::new(h, m)?.steps_for_overhead(t, lambda_max)
}

/// One sampled step factor: the gates and a global phase `e^{iφ}` carried alongside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDraw {
    pub gates: GateSequence,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepPair {
    pub step: usize,
    pub left: StepDraw,
    pub right: StepDraw,
}

/// Sampled left and right step factors for `λ·Tr[O L_r⋯L_1 ρ R_1⋯R_r]`.
///
/// `left` draws act on `ρ` from the left, `right` draws are the operators that
/// multiply `ρ` from the right.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSchedule {
    pub algorithm: String,
    pub n_qubits: usize,
    pub t: f64,
    pub r: usize,
    pub order: u32,
    pub lambda: f64,
    pub seed: u64,
    pub steps: Vec<StepPair>,
}

impl SimulationSchedule {
    /// `(V₁, V₂, θ)` for the cross-term circuit estimating `Re Tr[O e^{iθ} V₁ ρ V₂†]`.
    pub fn circuits(&self) -> Result<(GateSequence, GateSequence, f64)> {
        let mut v1 = GateSequence::new();
        let mut v2 = GateSequence::new();
        let mut theta = 0.0;
        for s in &self.steps {
            v1.extend(&s.left.gates);
            v2.extend(&s.right.gates.inverse()?);
            theta += s.left.phase + s.right.phase;
        }
        Ok((v1, v2, theta))
    }
}

/// `r` left draws from `C(t/r)` and `r` right draws from `C(−t/r)`, each on its own stream.
pub fn cts_schedule(h: &PauliSum, t: f64, r: usize, m: u32, seed: u64) -> Result<SimulationSchedule> {
    if r < 1 {
        return Err(ScuError::InvalidParameter("step count r must be at least 1".into()));
    }
    let model = CtsModel::new(h, m)?;
    let tau = t / r as f64;
    let fwd = model.decompose(tau)?;
    let bwd = model.decompose(-tau)?;
    let steps = (0..r)
        .map(|i| {
            let mut lr = stream(seed, 2 * i as u64);
            let mut rr = stream(seed, 2 * i as u64 + 1);
            StepPair {
                step: i,
                left: StepDraw {
                    gates: fwd.draw_gates(&fwd.sample(&mut lr)),
                    phase: 0.0,
                },
                right: StepDraw {
                    gates: bwd.draw_gates(&bwd.sample(&mut rr)),
                    phase: 0.0,
                },
            }
        })
        .collect();
    Ok(SimulationSchedule {
        algorithm: "cts".into(),
        n_qubits: h.n_qubits(),
        t,
        r,
        order: m,
        lambda: fwd.mu.powi(2 * r as i32),
        seed,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let h = PauliSum::from_real(&[(1.0, "XZ"), (0.5, "ZI")]);
        let d = cts_decompose(&h, 0.0, 3).unwrap();
        assert_eq!((d.l_c, d.l_s, d.theta, d.mu), (0.0, 0.0, 0.0, 1.0));
        assert_eq!(d.n_outcomes(), 1);
    }

    #[test]
    fn single_x_reconstruction() {
        let h = PauliSum::from_real(&[(1.0, "X")]);
        let t = 0.4_f64;
        let d = cts_decompose(&h, t, 7).unwrap();
        let rec = d.reconstruct();
        assert!((rec.identity_coeff().re - t.cos()).abs() < 1e-7);
        assert!((rec.coeff(&"X".parse().unwrap()).im + t.sin()).abs() < 1e-7);
    }

    #[test]
    fn schedule_for_zero_hamiltonian() {
        let h = PauliSum::zero(2);
        let s = cts_schedule(&h, 1.0, 1, 3, 0).unwrap();
        assert_eq!(s.lambda, 1.0);
        assert_eq!(s.steps.len(), 1);
        let (v1, v2, th) = s.circuits().unwrap();
        assert_eq!(th, 0.0);
        for g in v1.gates().iter().chain(v2.gates()) {
            match g {
                Gate::PauliRotation { pauli, angle } => {
                    assert!(pauli.is_identity());
                    assert_eq!(*angle, 0.0);
                }
                other => panic!("unexpected gate {other:?}"),
            }
        }
        assert!(cts_schedule(&h, 1.0, 0, 3, 0).is_err());
    }

    #[test]
    fn overhead_solver_is_self_consistent() {
        let h = PauliSum::from_real(&[(1.0, "ZZ"), (1.0, "XI"), (1.0, "IX")]);
        let model = CtsModel::new(&h, 3).unwrap();
        let r = model.steps_for_overhead(5.0, 2.0).unwrap();
        assert!(model.lambda(5.0, r).unwrap() <= 2.0);
        assert!(r == 1 || model.lambda(5.0, r - 1).unwrap() > 2.0);
        assert!(model.steps_for_overhead(5.0, 1.0).is_err());
    }
}
