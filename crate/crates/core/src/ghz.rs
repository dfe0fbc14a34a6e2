//! Damped GHZ preparation and multiple-quantum-coherence (MQC) fidelity estimation.
//!
//! The preparation is `H` on qubit 0 followed by a CNOT chain; after every CNOT
//! an amplitude-damping instance on the target is replaced by a sampled term of
//! its convex decomposition. The MQC circuit appends `R(θ) = (P(θ)X)^{⊗n}` and
//! the exact inverse of the sampled preparation (same draws, same ancillas), and
//! reads out the all-zero population of the system with each cross-term ancilla
//! contributing its X parity. Weighted by `λ = (1+p)^{n−1}` the mean reproduces
//! `S_θ = Tr[ρ R ρ R†]` of the damped state.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::channel::{convex_decompose, ConvexUnitaryDecomposition, KrausChannel, TermRef};
use crate::error::{Result, ScuError};
use crate::pauli::Pauli;
use crate::rng::{derive_seed, map_indexed, stream};
use crate::sim::{cross_term_circuit, Gate, GateSequence, StateVector};

/// Largest `n` for the exact (shots = 0) mode, which enumerates `8^{n−1}` branch pairs.
pub const EXACT_MAX_QUBITS: usize = 9;
/// Largest `n` for the shot mode, whose circuits carry one ancilla per sampled cross term.
pub const SHOT_MAX_QUBITS: usize = 12;

const SIGNAL_TAG: u64 = 0x5349_474e;
const POPULATION_TAG: u64 = 0x504f_5055;

pub fn build_ghz_prep(n: usize) -> Result<GateSequence> {
    if n < 1 {
        return Err(ScuError::InvalidParameter("GHZ state needs at least one qubit".into()));
    }
    let mut seq = GateSequence::new();
    seq.push(Gate::H { qubit: 0 });
    for k in 1..n {
        seq.push(Gate::Cnot {
            control: k - 1,
            target: k,
        });
    }
    Ok(seq)
}

pub fn damping_channel(p: f64) -> Result<KrausChannel> {
    KrausChannel::amplitude_damping(p)
}

/// `½(1−p)^{n−1}(1+cos nθ)`.
pub fn analytic_signal(n: usize, p: f64, theta: f64) -> f64 {
    0.5 * (1.0 - p).powi(n as i32 - 1) * (1.0 + (n as f64 * theta).cos())
}

/// `¼(1+(1−p)^{(n−1)/2})²`.
pub fn analytic_fidelity(n: usize, p: f64) -> f64 {
    0.25 * (1.0 + (1.0 - p).powf((n as f64 - 1.0) / 2.0)).powi(2)
}

/// `θ_j = 2πj/(4n)`, `j = 0..4n`.
pub fn default_theta_grid(n: usize) -> Vec<f64> {
    let m = 4 * n.max(1);
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

/// `I_m = (1/N) Σ_j S(θ_j) e^{imθ_j}` for `m = −order..=order`, on the uniform grid `θ_j = 2πj/N`.
///
/// Returns the real parts; the imaginary parts vanish for signals that are even in θ.
pub fn fourier_intensities(signal: &[f64], order: usize) -> Result<Vec<(i64, f64)>> {
    let needed = 2 * order + 1;
    if signal.len() < needed {
        return Err(ScuError::InsufficientGrid {
            points: signal.len(),
            order,
            needed,
        });
    }
    let nf = signal.len() as f64;
    let order = order as i64;
    Ok((-order..=order)
        .map(|m| {
            let acc: Complex64 = signal
                .iter()
                .enumerate()
                .map(|(j, s)| Complex64::from_polar(*s, 2.0 * PI * (m * j as i64) as f64 / nf))
                .sum();
            (m, acc.re / nf)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhzExperimentConfig {
    pub n_qubits: usize,
    pub damping_p: f64,
    pub theta_grid: Vec<f64>,
    /// Shots per angle and run; `0` selects the exact mode.
    pub shots_per_angle: usize,
    pub n_runs: usize,
    pub seed: u64,
}

impl GhzExperimentConfig {
    pub fn new(n_qubits: usize, damping_p: f64, shots_per_angle: usize, n_runs: usize, seed: u64) -> Self {
        GhzExperimentConfig {
            n_qubits,
            damping_p,
            theta_grid: default_theta_grid(n_qubits),
            shots_per_angle,
            n_runs,
            seed,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.shots_per_angle == 0
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n < 2 {
            return Err(ScuError::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        let cap = if self.is_exact() { EXACT_MAX_QUBITS } else { SHOT_MAX_QUBITS };
        if n > cap {
            return Err(ScuError::InvalidParameter(format!(
                "n = {n} exceeds the {} mode limit of {cap}",
                if self.is_exact() { "exact" } else { "shot" }
            )));
        }
        if !(0.0..=1.0).contains(&self.damping_p) {
            return Err(ScuError::InvalidParameter(format!(
                "damping p must lie in [0, 1], got {}",
                self.damping_p
            )));
        }
        if !self.is_exact() && self.n_runs == 0 {
            return Err(ScuError::InvalidParameter("n_runs must be at least 1".into()));
        }
        let m = self.theta_grid.len();
        if m < 2 * n + 1 {
            return Err(ScuError::InsufficientGrid {
                points: m,
                order: n,
                needed: 2 * n + 1,
            });
        }
        for (j, th) in self.theta_grid.iter().enumerate() {
            let want = 2.0 * PI * j as f64 / m as f64;
            if (th - want).abs() > 1e-9 {
                return Err(ScuError::InvalidParameter(format!(
                    "theta grid must be uniform on [0, 2π): point {j} is {th}, expected {want}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignalPoint {
    pub theta: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub signal: Vec<SignalPoint>,
    pub population: f64,
    pub population_stderr: f64,
    pub coherence: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MqcResult {
    pub n_qubits: usize,
    pub damping_p: f64,
    pub lambda: f64,
    pub exact: bool,
    /// Run-averaged signal.
    pub signal: Vec<SignalPoint>,
    pub intensities: Vec<(i64, f64)>,
    pub population: f64,
    pub coherence: f64,
    pub fidelity: f64,
    pub fidelity_stderr: f64,
    pub runs: Vec<RunRecord>,
}

/// `½(P + 2√max(I_n, 0))`.
fn fidelity_from(population: f64, intensities: &[(i64, f64)], n: usize) -> (f64, f64) {
    let i_n = intensities
        .iter()
        .find(|(m, _)| *m == n as i64)
        .map(|(_, v)| *v)
        .unwrap_or(0.0);
    let coherence = 2.0 * i_n.max(0.0).sqrt();
    (coherence, 0.5 * (population + coherence))
}

pub fn run_mqc_experiment(config: &GhzExperimentConfig) -> Result<MqcResult> {
    config.validate()?;
    let decomp = convex_decompose(&damping_channel(config.damping_p)?)?;
    if config.is_exact() {
        run_exact(config, &decomp)
    } else {
        run_shots(config, &decomp)
    }
}

fn pauli_index(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Branch-pair weights of one damping instance: `(ket Pauli, bra Pauli, weight)`.
///
/// A term contributes `λp` on its diagonal, a cross term splits `λp` evenly over
/// its two orderings. With `phased = false` the cross-term phase is dropped, which is
/// what the mirrored MQC circuit measures: its ancilla returns the real part of
/// `e^{iα}` times the conjugate branch, and the phase cancels against the mirror.
fn instance_pairs(decomp: &ConvexUnitaryDecomposition, phased: bool) -> Vec<(usize, usize, Complex64)> {
    let mut w = [[Complex64::new(0.0, 0.0); 4]; 4];
    for t in decomp.terms() {
        match t {
            TermRef::Diagonal(d) => {
                let i = pauli_index(d.unitary.get(0));
                w[i][i] += decomp.lambda * d.prob;
            }
            TermRef::Cross(c) => {
                let (j, k) = (pauli_index(c.left.get(0)), pauli_index(c.right.get(0)));
                let half = 0.5 * decomp.lambda * c.prob;
                let ph = if phased {
                    Complex64::from_polar(1.0, c.alpha)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                w[j][k] += ph * half;
                w[k][j] += ph.conj() * half;
            }
        }
    }
    let mut out = Vec::new();
    for (a, row) in w.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if v.norm() > 0.0 {
                out.push((a, b, *v));
            }
        }
    }
    out
}

/// State after the preparation with the fixed Pauli `P_k` inserted after CNOT `k`.
fn branch_state(n: usize, code: usize) -> Result<StateVector> {
    let mut seq = GateSequence::new();
    seq.push(Gate::H { qubit: 0 });
    let mut c = code;
    for k in 1..n {
        seq.push(Gate::Cnot {
            control: k - 1,
            target: k,
        });
        let p = PAULIS[c % 4];
        c /= 4;
        if p != Pauli::I {
            seq.push(Gate::Pauli {
                pauli: crate::pauli::PauliString::single(n, k, p),
            });
        }
    }
    StateVector::prepared(n, &seq)
}

/// Per-branch data: `⟨ψ|R(θ_j)|ψ⟩` on the grid and the two GHZ-pole amplitudes.
struct Branch {
    r: Vec<Complex64>,
    pole0: Complex64,
    pole1: Complex64,
}

fn branches(n: usize, grid: &[f64]) -> Result<Vec<Branch>> {
    let all = (1usize << n) - 1;
    map_indexed(4usize.pow(n as u32 - 1), |code| {
        let s = branch_state(n, code)?;
        let amps = s.amplitudes();
        // R|q⟩ = e^{iθ(n−|q|)}|q̄⟩, so ⟨ψ|R|ψ⟩ is a polynomial in e^{iθ}.
        let mut poly = vec![Complex64::new(0.0, 0.0); n + 1];
        for (q, a) in amps.iter().enumerate() {
            let e = n - q.count_ones() as usize;
            poly[e] += amps[q ^ all].conj() * a;
        }
        let r = grid
            .iter()
            .map(|th| {
                poly.iter()
                    .enumerate()
                    .map(|(e, c)| c * Complex64::from_polar(1.0, th * e as f64))
                    .sum()
            })
            .collect();
        Ok(Branch {
            r,
            pole0: amps[0],
            pole1: amps[all],
        })
    })
    .into_iter()
    .collect()
}

/// Calls `visit(p_code, q_code, weight)` for every branch pair with non-zero product weight.
fn for_each_pair<F: FnMut(usize, usize, Complex64)>(
    pairs: &[(usize, usize, Complex64)],
    depth: usize,
    level: usize,
    acc: (usize, usize, Complex64),
    visit: &mut F,
) {
    if level == depth {
        visit(acc.0, acc.1, acc.2);
        return;
    }
    let scale = 4usize.pow(level as u32);
    for &(a, b, w) in pairs {
        for_each_pair(
            pairs,
            depth,
            level + 1,
            (acc.0 + a * scale, acc.1 + b * scale, acc.2 * w),
            visit,
        );
    }
}

/// Exact signal and population by summing every composite term's exact value.
pub fn exact_signal_and_population(n: usize, p: f64, grid: &[f64]) -> Result<(Vec<f64>, f64)> {
    if !(2..=EXACT_MAX_QUBITS).contains(&n) {
        return Err(ScuError::InvalidParameter(format!(
            "exact mode supports 2 ≤ n ≤ {EXACT_MAX_QUBITS}, got {n}"
        )));
    }
    let decomp = convex_decompose(&damping_channel(p)?)?;
    let br = branches(n, grid)?;
    let mqc_pairs = instance_pairs(&decomp, false);
    let pop_pairs = instance_pairs(&decomp, true);
    let depth = n - 1;

    // Split the first instance across workers; partial sums are added in index order.
    let partial = map_indexed(mqc_pairs.len(), |i| {
        let (a, b, w) = mqc_pairs[i];
        let mut s = vec![Complex64::new(0.0, 0.0); grid.len()];
        for_each_pair(&mqc_pairs, depth, 1, (a, b, w), &mut |pc, qc, w| {
            let (rp, rq) = (&br[pc].r, &br[qc].r);
            for j in 0..s.len() {
                s[j] += w * rq[j].conj() * rp[j];
            }
        });
        s
    });
    let mut signal = vec![0.0; grid.len()];
    for s in partial {
        for (acc, v) in signal.iter_mut().zip(s) {
            *acc += v.re;
        }
    }

    let mut population = Complex64::new(0.0, 0.0);
    for_each_pair(&pop_pairs, depth, 0, (0, 0, Complex64::new(1.0, 0.0)), &mut |pc, qc, w| {
        let (bp, bq) = (&br[pc], &br[qc]);
        population += w * (bq.pole0.conj() * bp.pole0 + bq.pole1.conj() * bp.pole1);
    });
    Ok((signal, population.re))
}

fn run_exact(config: &GhzExperimentConfig, decomp: &ConvexUnitaryDecomposition) -> Result<MqcResult> {
    let n = config.n_qubits;
    let (signal, population) = exact_signal_and_population(n, config.damping_p, &config.theta_grid)?;
    let intensities = fourier_intensities(&signal, n)?;
    let (coherence, fidelity) = fidelity_from(population, &intensities, n);
    let points: Vec<SignalPoint> = config
        .theta_grid
        .iter()
        .zip(&signal)
        .map(|(theta, mean)| SignalPoint {
            theta: *theta,
            mean: *mean,
            stderr: 0.0,
        })
        .collect();
    Ok(MqcResult {
        n_qubits: n,
        damping_p: config.damping_p,
        lambda: decomp.lambda.powi(n as i32 - 1),
        exact: true,
        signal: points.clone(),
        intensities,
        population,
        coherence,
        fidelity,
        fidelity_stderr: 0.0,
        runs: vec![RunRecord {
            run: 0,
            signal: points,
            population,
            population_stderr: 0.0,
            coherence,
            fidelity,
        }],
    })
}

/// Which readout a sampled circuit ends with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MqcReadout {
    /// `R(θ)` and the mirrored inverse, then the all-zero system population.
    Signal(f64),
    /// Preparation only, then the `|0ⁿ⟩` plus `|1ⁿ⟩` populations.
    Population,
}

/// Full ancilla circuit for one damping configuration (term indices per instance).
///
/// Returns the circuit and the register size; ancillas follow the system qubits in
/// the order of the cross-term instances.
pub fn mqc_circuit(
    n: usize,
    decomp: &ConvexUnitaryDecomposition,
    config: &[usize],
    readout: MqcReadout,
) -> Result<(GateSequence, usize)> {
    if config.len() != n - 1 {
        return Err(ScuError::InvalidParameter(format!(
            "expected {} damping draws, got {}",
            n - 1,
            config.len()
        )));
    }
    let n_cross = config
        .iter()
        .filter(|&&t| matches!(decomp.term(t), TermRef::Cross(_)))
        .count();
    let total = n + n_cross;
    let mut prep = GateSequence::new();
    prep.push(Gate::H { qubit: 0 });
    let mut ancilla = n;
    let mut ancillas = Vec::with_capacity(n_cross);
    for k in 1..n {
        prep.push(Gate::Cnot {
            control: k - 1,
            target: k,
        });
        match decomp.term(config[k - 1]) {
            TermRef::Diagonal(d) => {
                if !d.unitary.is_identity() {
                    prep.push(Gate::Pauli {
                        pauli: d.unitary.placed(total, k),
                    });
                }
            }
            TermRef::Cross(c) => {
                let v1 = GateSequence::from(vec![Gate::Pauli {
                    pauli: c.left.placed(total, k),
                }]);
                let v2 = GateSequence::from(vec![Gate::Pauli {
                    pauli: c.right.placed(total, k),
                }]);
                prep.extend(&cross_term_circuit(&v1, &v2, c.alpha, ancilla)?);
                ancillas.push(ancilla);
                ancilla += 1;
            }
        }
    }
    let mut seq = prep.clone();
    match readout {
        MqcReadout::Signal(theta) => {
            for q in 0..n {
                seq.push(Gate::X { qubit: q });
                seq.push(Gate::Phase { qubit: q, angle: theta });
            }
            // The mirror ends with H on each ancilla, which turns the X readout into a Z readout.
            seq.extend(&prep.inverse()?);
        }
        MqcReadout::Population => {
            for a in ancillas {
                seq.push(Gate::AncillaXMeasure { qubit: a });
            }
        }
    }
    Ok((seq, total))
}

/// Probabilities of the `+1` and `−1` outcomes of one configuration's readout.
///
/// The outcome is `0` unless the system is in an accepted basis state, and then the
/// ancilla parity sign.
pub fn mqc_outcome_probs(
    n: usize,
    decomp: &ConvexUnitaryDecomposition,
    config: &[usize],
    readout: MqcReadout,
) -> Result<(f64, f64)> {
    let (seq, total) = mqc_circuit(n, decomp, config, readout)?;
    let state = StateVector::prepared(total, &seq)?;
    let sys_mask = (1usize << n) - 1;
    let accept = |s: usize| match readout {
        MqcReadout::Signal(_) => s == 0,
        MqcReadout::Population => s == 0 || s == sys_mask,
    };
    let (mut plus, mut minus) = (0.0, 0.0);
    for (b, a) in state.amplitudes().iter().enumerate() {
        if accept(b & sys_mask) {
            if (b >> n).count_ones().is_multiple_of(2) {
                plus += a.norm_sqr();
            } else {
                minus += a.norm_sqr();
            }
        }
    }
    Ok((plus, minus))
}

/// Exact signal and population by enumerating every configuration's full ancilla circuit.
///
/// Exponential in `n` (`6^{n−1}` circuits); intended as an independent check at small `n`.
pub fn exhaustive_circuit_signal(n: usize, p: f64, grid: &[f64]) -> Result<(Vec<f64>, f64)> {
    if !(2..=5).contains(&n) {
        return Err(ScuError::InvalidParameter(format!(
            "circuit enumeration supports 2 ≤ n ≤ 5, got {n}"
        )));
    }
    let decomp = convex_decompose(&damping_channel(p)?)?;
    let t = decomp.n_terms();
    let n_configs = t.pow(n as u32 - 1);
    let mut signal = vec![0.0; grid.len()];
    let mut population = 0.0;
    for code in 0..n_configs {
        let mut c = code;
        let mut config = Vec::with_capacity(n - 1);
        let mut weight = 1.0;
        for _ in 1..n {
            let idx = c % t;
            c /= t;
            weight *= decomp.lambda * decomp.term_prob(idx);
            config.push(idx);
        }
        for (j, th) in grid.iter().enumerate() {
            let (pl, mi) = mqc_outcome_probs(n, &decomp, &config, MqcReadout::Signal(*th))?;
            signal[j] += weight * (pl - mi);
        }
        let (pl, mi) = mqc_outcome_probs(n, &decomp, &config, MqcReadout::Population)?;
        population += weight * (pl - mi);
    }
    Ok((signal, population))
}

fn draw_config<R: Rng + ?Sized>(decomp: &ConvexUnitaryDecomposition, n: usize, rng: &mut R) -> Vec<usize> {
    (1..n).map(|_| decomp.sample_index(rng)).collect()
}

/// Draws `shots` single-shot outcomes, caching outcome probabilities per configuration.
fn sample_shots<R: Rng + ?Sized>(
    n: usize,
    decomp: &ConvexUnitaryDecomposition,
    readout: MqcReadout,
    shots: usize,
    rng: &mut R,
    cache: &mut HashMap<Vec<usize>, (f64, f64)>,
) -> Result<(f64, f64)> {
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for _ in 0..shots {
        let config = draw_config(decomp, n, rng);
        let (plus, minus) = match cache.get(&config) {
            Some(v) => *v,
            None => {
                let v = mqc_outcome_probs(n, decomp, &config, readout)?;
                cache.insert(config, v);
                v
            }
        };
        let u: f64 = rng.random();
        let v = if u < plus {
            1.0
        } else if u < plus + minus {
            -1.0
        } else {
            0.0
        };
        sum += v;
        sumsq += v * v;
    }
    Ok((sum, sumsq))
}

/// Mean and standard error of `λ·v` from the running sums of `v`.
fn weighted_mean(sum: f64, sumsq: f64, shots: usize, lambda: f64) -> (f64, f64) {
    let k = shots as f64;
    let mean = sum / k;
    let var = if shots > 1 {
        ((sumsq - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    (lambda * mean, lambda * (var / k).sqrt())
}

fn run_shots(config: &GhzExperimentConfig, decomp: &ConvexUnitaryDecomposition) -> Result<MqcResult> {
    let n = config.n_qubits;
    let runs = config.n_runs;
    let shots = config.shots_per_angle;
    let grid = &config.theta_grid;
    let lambda = decomp.lambda.powi(n as i32 - 1);

    // One worker per angle; its configuration cache is shared by all runs at that angle.
    let sig_seed = derive_seed(config.seed, SIGNAL_TAG);
    let per_angle = map_indexed(grid.len(), |j| -> Result<Vec<(f64, f64)>> {
        let mut cache = HashMap::new();
        (0..runs)
            .map(|r| {
                let mut rng = stream(sig_seed, (r * grid.len() + j) as u64);
                let (s, ss) = sample_shots(n, decomp, MqcReadout::Signal(grid[j]), shots, &mut rng, &mut cache)?;
                Ok(weighted_mean(s, ss, shots, lambda))
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // The population pass spends the same shot budget per run as the whole signal sweep.
    let pop_shots = shots * grid.len();
    let pop_seed = derive_seed(config.seed, POPULATION_TAG);
    let populations = map_indexed(runs, |r| {
        let mut cache = HashMap::new();
        let mut rng = stream(pop_seed, r as u64);
        let (s, ss) = sample_shots(n, decomp, MqcReadout::Population, pop_shots, &mut rng, &mut cache)?;
        Ok(weighted_mean(s, ss, pop_shots, lambda))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut run_records = Vec::with_capacity(runs);
    for (r, &(population, population_stderr)) in populations.iter().enumerate() {
        let signal: Vec<SignalPoint> = grid
            .iter()
            .enumerate()
            .map(|(j, th)| SignalPoint {
                theta: *th,
                mean: per_angle[j][r].0,
                stderr: per_angle[j][r].1,
            })
            .collect();
        let means: Vec<f64> = signal.iter().map(|s| s.mean).collect();
        let intensities = fourier_intensities(&means, n)?;
        let (coherence, fidelity) = fidelity_from(population, &intensities, n);
        run_records.push(RunRecord {
            run: r,
            signal,
            population,
            population_stderr,
            coherence,
            fidelity,
        });
    }

    let rf = runs as f64;
    let signal: Vec<SignalPoint> = grid
        .iter()
        .enumerate()
        .map(|(j, th)| {
            let mean = per_angle[j].iter().map(|v| v.0).sum::<f64>() / rf;
            let var: f64 = per_angle[j].iter().map(|v| v.1 * v.1).sum();
            SignalPoint {
                theta: *th,
                mean,
                stderr: var.sqrt() / rf,
            }
        })
        .collect();
    let means: Vec<f64> = signal.iter().map(|s| s.mean).collect();
    let intensities = fourier_intensities(&means, n)?;
    let population = populations.iter().map(|v| v.0).sum::<f64>() / rf;
    let coherence = run_records.iter().map(|r| r.coherence).sum::<f64>() / rf;
    let fids: Vec<f64> = run_records.iter().map(|r| r.fidelity).collect();
    let fidelity = fids.iter().sum::<f64>() / rf;
    let fidelity_stderr = if runs > 1 {
        let var = fids.iter().map(|f| (f - fidelity).powi(2)).sum::<f64>() / (rf - 1.0);
        (var / rf).sqrt()
    } else {
        0.0
    };
    Ok(MqcResult {
        n_qubits: n,
        damping_p: config.damping_p,
        lambda,
        exact: false,
        signal,
        intensities,
        population,
        coherence,
        fidelity,
        fidelity_stderr,
        runs: run_records,
    })
}
