//! CNOT counts and sampling overheads for TFIM simulation sweeps and the
//! damping-channel comparison.
//!
//! CNOT conversion uses one rule throughout: a (controlled) `k`-qubit Pauli
//! exponential costs `2(k−1)` CNOTs uncontrolled and `2k` controlled.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::{spectral_norm, CMatrix};
use crate::error::{Result, ScuError};
use crate::hamsim::{taylor_tail, smallest_steps, CtsModel, EnhancedModel, RemainderSeries};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng::map_indexed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Qdrift,
    Pf1,
    Pf2,
    Pf1Enhanced,
    Pf2Enhanced,
    Cts,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Qdrift,
        Algorithm::Pf1,
        Algorithm::Pf2,
        Algorithm::Pf1Enhanced,
        Algorithm::Pf2Enhanced,
        Algorithm::Cts,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Qdrift => "qdrift",
            Algorithm::Pf1 => "pf1",
            Algorithm::Pf2 => "pf2",
            Algorithm::Pf1Enhanced => "pf1_enhanced",
            Algorithm::Pf2Enhanced => "pf2_enhanced",
            Algorithm::Cts => "cts",
        }
    }

    /// Product-formula order for the PF families.
    pub fn pf_order(self) -> Option<u32> {
        match self {
            Algorithm::Pf1 | Algorithm::Pf1Enhanced => Some(1),
            Algorithm::Pf2 | Algorithm::Pf2Enhanced => Some(2),
            _ => None,
        }
    }

    /// The constraint that fixes `r` in a sweep.
    pub fn constraint_kind(self) -> ConstraintKind {
        match self {
            Algorithm::Qdrift => ConstraintKind::EpsilonDiamond,
            Algorithm::Pf1 | Algorithm::Pf2 => ConstraintKind::Epsilon,
            Algorithm::Pf1Enhanced | Algorithm::Pf2Enhanced | Algorithm::Cts => ConstraintKind::LambdaMax,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = ScuError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| ScuError::Parse(format!("unknown algorithm `{s}` (expected qdrift, pf1, pf2, pf1_enhanced, pf2_enhanced or cts)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Spectral-norm error of the simulated evolution.
    Epsilon,
    /// Diamond-norm error (qDRIFT).
    EpsilonDiamond,
    /// Bound on the normalization `λ`.
    LambdaMax,
}

impl ConstraintKind {
    pub fn tag(self) -> &'static str {
        match self {
            ConstraintKind::Epsilon => "epsilon",
            ConstraintKind::EpsilonDiamond => "epsilon_diamond",
            ConstraintKind::LambdaMax => "lambda_max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub algorithm: Algorithm,
    pub n: usize,
    pub t: f64,
    pub constraint: Constraint,
    pub r: u64,
    pub lambda: f64,
    pub cnot_count: f64,
    /// `λ²`.
    pub overhead: f64,
}

/// `H = −J Σ Z_i Z_{i+1} − h Σ X_j` on an open chain; ZZ terms first.
pub fn tfim_hamiltonian(n: usize, j: f64, h: f64) -> Result<PauliSum> {
    if n < 2 {
        return Err(ScuError::InvalidParameter(format!("TFIM needs at least 2 sites, got {n}")));
    }
    let mut out = PauliSum::zero(n);
    for i in 0..n - 1 {
        let mut p = PauliString::identity(n);
        p.set(i, Pauli::Z);
        p.set(i + 1, Pauli::Z);
        out.add_term(&p, (-j).into());
    }
    for q in 0..n {
        out.add_term(&PauliString::single(n, q, Pauli::X), (-h).into());
    }
    out.prune();
    Ok(out)
}

/// `N ≤ 2λ_H²t²/ε_⋄`.
pub fn qdrift_gate_bound(lambda_h: f64, t: f64, epsilon_diamond: f64) -> f64 {
    2.0 * lambda_h * lambda_h * t * t / epsilon_diamond
}

/// Share of `|H|₁` carried by terms of weight ≥ 2.
pub fn two_qubit_fraction(h: &PauliSum) -> f64 {
    let total = h.l1_norm();
    if total == 0.0 {
        return 0.0;
    }
    h.iter().filter(|(p, _)| p.weight() >= 2).map(|(_, c)| c.norm()).sum::<f64>() / total
}

/// `⟨N₁⟩ = r(1 − λ^{−1/r})`, the expected number of non-`S_p` draws.
pub fn n1_expected(r: u64, lambda: f64) -> f64 {
    let r = r as f64;
    -r * (-lambda.ln() / r).exp_m1()
}

/// CNOT cost of `r` steps on an `n`-site TFIM.
///
/// pf2 merges the two half-steps of the first ZZ exponential at each of the `r−1`
/// step boundaries. Each enhanced-PF correction is a Pauli string of weight at most
/// `n`, charged `n` CNOTs.
pub fn cnot_convert(algorithm: Algorithm, n: usize, r: u64, lambda: f64) -> f64 {
    let (nf, rf) = (n as f64, r as f64);
    let two_qubit_exps = 2.0 * (nf - 1.0) * rf;
    match algorithm {
        Algorithm::Pf1 => 2.0 * (nf - 1.0) * rf,
        Algorithm::Pf2 => 2.0 * (two_qubit_exps - (rf - 1.0)),
        Algorithm::Pf1Enhanced => cnot_convert(Algorithm::Pf1, n, r, lambda) + nf * n1_expected(r, lambda),
        Algorithm::Pf2Enhanced => cnot_convert(Algorithm::Pf2, n, r, lambda) + nf * n1_expected(r, lambda),
        Algorithm::Cts => 6.0 * rf,
        // r is the qDRIFT gate count; the TFIM two-qubit share is (n−1)/(2n−1).
        Algorithm::Qdrift => rf * 2.0 * (nf - 1.0) / (2.0 * nf - 1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingComparison {
    pub n: usize,
    pub p: f64,
    pub instances: usize,
    /// CNOT-efficient dilation with one ancilla.
    pub direct_cnots_per_instance: f64,
    /// Four-CNOT damping circuit from the earlier literature.
    pub four_cnot_per_instance: f64,
    pub stochastic_cnots_per_instance: f64,
    /// `(1+p)²`, the `λ²` of a single damping channel.
    pub overhead_per_instance: f64,
    pub direct_cnots: f64,
    pub four_cnot_total: f64,
    pub stochastic_cnots: f64,
    /// `λ² = (1+p)^{2(n−1)}` for the whole experiment.
    pub overhead: f64,
}

/// Dilated-circuit versus sampled cost of the damping instances in an `n`-qubit MQC run.
pub fn damping_comparison(n: usize, p: f64) -> Result<DampingComparison> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScuError::InvalidParameter(format!("damping probability must lie in [0, 1], got {p}")));
    }
    if n < 2 {
        return Err(ScuError::InvalidParameter(format!("MQC needs at least 2 qubits, got {n}")));
    }
    let instances = 2 * (n - 1);
    let stochastic = 2.0 * p / (1.0 + p);
    let per = (1.0 + p).powi(2);
    Ok(DampingComparison {
        n,
        p,
        instances,
        direct_cnots_per_instance: 2.0,
        four_cnot_per_instance: 4.0,
        stochastic_cnots_per_instance: stochastic,
        overhead_per_instance: per,
        direct_cnots: 2.0 * instances as f64,
        four_cnot_total: 4.0 * instances as f64,
        stochastic_cnots: stochastic * instances as f64,
        overhead: (1.0 + p).powi(instances as i32),
    })
}

/// `2‖U − Σ_k p_k V_k‖`, an upper bound on the diamond distance of the channels.
pub fn diamond_norm_bound(u: &CMatrix, ensemble: &[(f64, CMatrix)]) -> Result<f64> {
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-10 || ensemble.iter().any(|(p, _)| *p < 0.0) {
        return Err(ScuError::ProbabilitySum(total));
    }
    let mut diff = u.clone();
    for (p, v) in ensemble {
        if v.shape() != u.shape() {
            return Err(ScuError::DimensionMismatch {
                left: u.nrows(),
                right: v.nrows(),
            });
        }
        diff -= v * num_complex::Complex64::from(*p);
    }
    Ok(2.0 * spectral_norm(&diff))
}

/// Truncation order of the full expansion used for each algorithm.
pub fn default_expansion_order(algorithm: Algorithm) -> u32 {
    match algorithm {
        Algorithm::Pf2 | Algorithm::Pf2Enhanced => 4,
        _ => 3,
    }
}

/// Highest order reached by sampled layers (pf2 only).
pub const PF2_LAYERED_ORDER: u32 = 7;

/// Smallest `r` with `r·(Σ_{k=p+1}^{M} |R_k|₁τ^k + 2·tail(|H|₁τ, M)) ≤ ε`, `τ = t/r`.
pub fn pf_steps_for_error(rem: &RemainderSeries, t: f64, epsilon: f64) -> Result<u64> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(ScuError::InvalidParameter(format!("error target must be positive, got {epsilon}")));
    }
    let x = rem.h_l1() * t.abs();
    smallest_steps(|r| {
        let rf = r as f64;
        let tau = t / rf;
        rf * (rem.l1_bound(tau) + 2.0 * taylor_tail(x / rf, rem.max_order())) <= epsilon
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Spectral errors for pf1 and pf2.
    pub epsilons: Vec<f64>,
    /// Diamond-norm errors for qDRIFT.
    pub diamond_epsilons: Vec<f64>,
    /// Overhead bounds for CTS and the enhanced formulas.
    pub lambda_maxes: Vec<f64>,
    pub j: f64,
    pub h: f64,
    /// `t = time_factor · n`.
    pub time_factor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: (4..=20).step_by(2).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            epsilons: vec![1e-6, 1e-3],
            diamond_epsilons: vec![2e-6, 2e-3],
            lambda_maxes: vec![2.0, 2000.0],
            j: 1.0,
            h: 1.0,
            time_factor: 1.0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ScuError::InvalidParameter(m));
        if self.sizes.is_empty() {
            return bad("no system sizes given".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms given".into());
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 2) {
            return bad(format!("system size {n} is below 2"));
        }
        if !(self.time_factor > 0.0 && self.time_factor.is_finite()) {
            return bad(format!("time factor must be positive, got {}", self.time_factor));
        }
        for e in self.epsilons.iter().chain(&self.diamond_epsilons) {
            if !(*e > 0.0 && e.is_finite()) {
                return bad(format!("error targets must be positive, got {e}"));
            }
        }
        if let Some(l) = self.lambda_maxes.iter().find(|&&l| !(l > 1.0 && l.is_finite())) {
            return bad(format!("overhead bounds must exceed 1, got {l}"));
        }
        for a in &self.algorithms {
            if self.constraint_values(*a).is_empty() {
                return bad(format!("algorithm {a} needs at least one {} value", a.constraint_kind().tag()));
            }
        }
        Ok(())
    }

    fn constraint_values(&self, a: Algorithm) -> &[f64] {
        match a.constraint_kind() {
            ConstraintKind::Epsilon => &self.epsilons,
            ConstraintKind::EpsilonDiamond => &self.diamond_epsilons,
            ConstraintKind::LambdaMax => &self.lambda_maxes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub n: usize,
    pub algorithm: Algorithm,
    pub constraint: Constraint,
    pub error: String,
}

/// `cnot_count ≈ prefactor · n^exponent` over one (algorithm, constraint) curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub algorithm: Algorithm,
    pub constraint: Constraint,
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<ResourceEstimate>,
    pub fits: Vec<PowerLawFit>,
    pub failures: Vec<SweepFailure>,
}

/// Least-squares line through `(ln x, ln y)`: `(prefactor, exponent, R²)`.
pub fn power_law_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some((a.exp(), b, r2))
}

enum Solver {
    Qdrift { lambda_h: f64 },
    Pf(RemainderSeries),
    Enhanced(EnhancedModel),
    Cts(CtsModel),
}

fn build_solver(a: Algorithm, h: &PauliSum) -> Result<Solver> {
    let m = default_expansion_order(a);
    Ok(match a {
        Algorithm::Qdrift => Solver::Qdrift { lambda_h: h.l1_norm() },
        Algorithm::Pf1 | Algorithm::Pf2 => Solver::Pf(RemainderSeries::new(h, a.pf_order().unwrap_or(1), m)?),
        Algorithm::Pf1Enhanced => Solver::Enhanced(EnhancedModel::new(h, 1, m, m)?),
        Algorithm::Pf2Enhanced => Solver::Enhanced(EnhancedModel::new(h, 2, m, PF2_LAYERED_ORDER)?),
        Algorithm::Cts => Solver::Cts(CtsModel::new(h, m)?),
    })
}

/// `(r, λ)` for one constraint value.
fn solve(solver: &Solver, t: f64, value: f64) -> Result<(u64, f64)> {
    match solver {
        Solver::Qdrift { lambda_h } => {
            let n = qdrift_gate_bound(*lambda_h, t, value).ceil();
            if !(n.is_finite() && n < u64::MAX as f64) {
                return Err(ScuError::InvalidParameter(format!("qDRIFT gate bound {n} is not representable")));
            }
            Ok(((n as u64).max(1), 1.0))
        }
        Solver::Pf(rem) => Ok((pf_steps_for_error(rem, t, value)?, 1.0)),
        Solver::Enhanced(m) => {
            let r = m.steps_for_overhead(t, value)?;
            Ok((r, m.lambda(t, r)))
        }
        Solver::Cts(m) => {
            let r = m.steps_for_overhead(t, value)?;
            Ok((r, m.lambda(t, r)?))
        }
    }
}

/// CNOT estimates for every (n, algorithm, constraint) in the config.
///
/// Rows are ordered by n, then algorithm as listed, then constraint value as listed.
/// Solver failures become entries in `failures` and never stop the sweep.
pub fn tfim_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let jobs: Vec<(usize, Algorithm)> = config
        .sizes
        .iter()
        .flat_map(|&n| config.algorithms.iter().map(move |&a| (n, a)))
        .collect();
    type JobOut = Vec<std::result::Result<ResourceEstimate, SweepFailure>>;
    let outputs: Vec<JobOut> = map_indexed(jobs.len(), |i| {
        let (n, a) = jobs[i];
        let t = config.time_factor * n as f64;
        let kind = a.constraint_kind();
        let values = config.constraint_values(a);
        let fail = |value: f64, e: ScuError| SweepFailure {
            n,
            algorithm: a,
            constraint: Constraint { kind, value },
            error: e.to_string(),
        };
        let solver = tfim_hamiltonian(n, config.j, config.h).and_then(|h| build_solver(a, &h));
        let solver = match solver {
            Ok(s) => s,
            Err(e) => return values.iter().map(|&v| Err(fail(v, e.clone()))).collect(),
        };
        values
            .iter()
            .map(|&value| {
                let (r, lambda) = solve(&solver, t, value).map_err(|e| fail(value, e))?;
                Ok(ResourceEstimate {
                    algorithm: a,
                    n,
                    t,
                    constraint: Constraint { kind, value },
                    r,
                    lambda,
                    cnot_count: cnot_convert(a, n, r, lambda),
                    overhead: lambda * lambda,
                })
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for out in outputs.into_iter().flatten() {
        match out {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    let mut fits = Vec::new();
    for &a in &config.algorithms {
        for &value in config.constraint_values(a) {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.algorithm == a && r.constraint.value == value)
                .map(|r| (r.n as f64, r.cnot_count))
                .collect();
            if let Some((prefactor, exponent, r_squared)) = power_law_fit(&pts) {
                fits.push(PowerLawFit {
                    algorithm: a,
                    constraint: Constraint {
                        kind: a.constraint_kind(),
                        value,
                    },
                    prefactor,
                    exponent,
                    r_squared,
                    n_points: pts.len(),
                });
            }
        }
    }
    Ok(SweepResult { rows, fits, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_shape() {
        let h = tfim_hamiltonian(2, 1.0, 1.0).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.l1_norm(), 3.0);
        assert_eq!(tfim_hamiltonian(50, 1.0, 1.0).unwrap().len(), 99);
        assert!(tfim_hamiltonian(1, 1.0, 1.0).is_err());
        let h = tfim_hamiltonian(5, 1.0, 1.0).unwrap();
        assert!((two_qubit_fraction(&h) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(cnot_convert(Algorithm::Cts, 8, 10, 3.0), 60.0);
        assert_eq!(n1_expected(5, 1.0), 0.0);
        assert!((n1_expected(1000, 2.0) - 0.693).abs() < 1e-3);
        assert_eq!(cnot_convert(Algorithm::Pf1, 4, 3, 1.0), 18.0);
        assert_eq!(cnot_convert(Algorithm::Pf2, 4, 3, 1.0), 2.0 * (18.0 - 2.0));
        assert_eq!(qdrift_gate_bound(1.0, 1.0, 2.0), 1.0);
        assert_eq!("pf2_enhanced".parse::<Algorithm>().unwrap(), Algorithm::Pf2Enhanced);
        assert!("pf3".parse::<Algorithm>().is_err());
    }

    #[test]
    fn damping_rows() {
        let d = damping_comparison(8, 0.15).unwrap();
        assert_eq!((d.direct_cnots, d.four_cnot_total), (28.0, 56.0));
        assert!((d.stochastic_cnots - 3.652).abs() < 1e-3);
        let d = damping_comparison(8, 0.05).unwrap();
        assert!((d.overhead - 1.98).abs() < 5e-3);
        let d = damping_comparison(3, 0.0).unwrap();
        assert_eq!((d.stochastic_cnots, d.overhead), (0.0, 1.0));
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|n| (n as f64, 3.0 * (n as f64).powf(2.5))).collect();
        let (a, b, r2) = power_law_fit(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-10 && (b - 2.5).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
