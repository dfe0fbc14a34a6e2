//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use scu::channel::{convex_decompose, KrausChannel};
use scu::dense::{all_paulis, expm_hermitian, projector, spectral_norm, sum_matrix, CMatrix, max_abs_diff};
use scu::ghz::{analytic_fidelity, analytic_signal, run_mqc_experiment, GhzExperimentConfig, MqcResult};
use scu::hamsim::{cts_decompose, pf_remainder, product_formula, CtsModel, EnhancedModel, LayeredProduct};
use scu::pauli::PauliSum;
use scu::resources::{
    damping_comparison, n1_expected, qdrift_gate_bound, tfim_hamiltonian, tfim_sweep, Algorithm, SweepConfig,
};
use scu::rng::stream;
use scu::sim::{exact_channel_apply, sequence_unitary, Gate};

const GHZ_EXACT_TOL: f64 = 1e-3;
const GHZ_SHOT_TOL: f64 = 0.02;
const MQC_SIGMAS: f64 = 4.0;
const MQC_COVERAGE: f64 = 0.95;
const UNBIASED_TOL: f64 = 1e-10;
const RECONSTRUCT_TOL: f64 = 1e-10;
const SLOPE_SLACK: f64 = 0.2;
/// Least-squares noise allowed on an exponent whose asymptotic value is exactly −M.
const SLOPE_FIT_TOL: f64 = 0.05;
const COMMUTATOR_TOL: f64 = 1e-12;
const LAYERING_TOL: f64 = 1e-10;
const N1_REL_TOL: f64 = 1e-3;
const R2_MIN: f64 = 0.98;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn identity(d: usize) -> CMatrix {
    DMatrix::identity(d, d)
}

fn random_hamiltonian(seed: u64, n: usize) -> PauliSum {
    let mut rng = stream(seed, 0);
    let paulis = all_paulis(n);
    let mut h = PauliSum::zero(n);
    for _ in 0..rng.random_range(2..=paulis.len().min(6)) {
        let p = &paulis[rng.random_range(1..paulis.len())];
        h.add_term(p, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
    }
    h.prune();
    h
}

/// Dense `Σ_{k≤M} (−iHt)^k/k!`.
fn dense_taylor(h: &CMatrix, t: f64, m: u32) -> CMatrix {
    let a = h * Complex64::new(0.0, -t);
    let mut term = identity(h.nrows());
    let mut out = term.clone();
    for k in 1..=m {
        term = &term * &a / Complex64::from(k as f64);
        out += &term;
    }
    out
}

fn random_channel(seed: u64) -> KrausChannel {
    let mut rng = stream(seed, 1);
    let n = 1 + (seed as usize % 3);
    let d = 1usize << n;
    let k = rng.random_range(1..=4usize);
    let g = DMatrix::from_fn(k * d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let q = g.qr().q();
    let kraus: Vec<CMatrix> = (0..k).map(|i| q.rows(i * d, d).into_owned()).collect();
    KrausChannel::from_dense(&kraus).unwrap()
}

fn random_state(seed: u64, n: usize) -> CMatrix {
    let mut rng = stream(seed, 2);
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
    projector(&amps)
}

fn ghz_runs(shots: usize, runs: usize) -> Result<Vec<MqcResult>, String> {
    [0.0, 0.05, 0.15]
        .iter()
        .map(|&p| run_mqc_experiment(&GhzExperimentConfig::new(8, p, shots, runs, 2024)).map_err(|e| e.to_string()))
        .collect()
}

fn ghz_fidelities(shot: &[MqcResult]) -> Outcome {
    let exact = ghz_runs(0, 1)?;
    let mut detail = Vec::new();
    for (res, printed) in exact.iter().zip([1.0, 0.842, 0.613]) {
        let p = res.damping_p;
        let a = analytic_fidelity(8, p);
        ensure((res.fidelity - a).abs() <= GHZ_EXACT_TOL, || format!("exact p={p}: F={} vs {a}", res.fidelity))?;
        ensure((res.fidelity - printed).abs() <= GHZ_EXACT_TOL, || format!("exact p={p}: F={} vs {printed}", res.fidelity))?;
        detail.push(format!("{:.4}", res.fidelity));
    }
    for res in shot {
        let a = analytic_fidelity(8, res.damping_p);
        ensure((res.fidelity - a).abs() <= GHZ_SHOT_TOL, || {
            format!("shots p={}: F={} vs {a}", res.damping_p, res.fidelity)
        })?;
        detail.push(format!("{:.3}±{:.3}", res.fidelity, res.fidelity_stderr));
    }
    Ok(format!("n=8 exact/shot F = {}", detail.join(", ")))
}

fn mqc_signal(shot: &[MqcResult]) -> Outcome {
    let mut parts = Vec::new();
    for res in shot {
        let within = res
            .signal
            .iter()
            .filter(|pt| {
                (pt.mean - analytic_signal(8, res.damping_p, pt.theta)).abs() <= MQC_SIGMAS * pt.stderr + 1e-12
            })
            .count();
        let frac = within as f64 / res.signal.len() as f64;
        ensure(frac >= MQC_COVERAGE, || format!("p={}: {within}/{} within 4σ", res.damping_p, res.signal.len()))?;
        parts.push(format!("p={}: {within}/{}", res.damping_p, res.signal.len()));
    }
    Ok(parts.join(", "))
}

fn unbiasedness() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let ch = random_channel(seed);
        let dec = convex_decompose(&ch).map_err(|e| e.to_string())?;
        let rho = random_state(seed, ch.n_qubits());
        let diff = max_abs_diff(&dec.apply_dense(&rho).unwrap(), &exact_channel_apply(&ch, &rho).unwrap());
        worst = worst.max(diff);
    }
    ensure(worst <= UNBIASED_TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("50 channels, max deviation {worst:.1e}"))
}

fn cts_reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 3);
        let h = random_hamiltonian(seed, n);
        let hm = sum_matrix(&h).unwrap();
        let t = 0.05 + 0.1 * (seed % 7) as f64;
        let x = t * h.l1_norm();
        for m in [2, 3, 5] {
            let d = cts_decompose(&h, t, m).map_err(|e| e.to_string())?;
            let diff = spectral_norm(&(sum_matrix(&d.reconstruct()).unwrap() - dense_taylor(&hm, t, m)));
            worst = worst.max(diff);
            ensure(d.l_c <= x.cosh() - 1.0 + 1e-12, || format!("seed {seed}: L_c {} > cosh-1", d.l_c))?;
            ensure(d.l_s <= x.sinh() + 1e-12, || format!("seed {seed}: L_s {} > sinh", d.l_s))?;
        }
    }
    ensure(worst <= RECONSTRUCT_TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("20 H × M∈{{2,3,5}}, max deviation {worst:.1e}"))
}

fn cts_scaling() -> Outcome {
    let h = tfim_hamiltonian(3, 1.0, 1.0).unwrap();
    let exact = expm_hermitian(&sum_matrix(&h).unwrap(), 1.0);
    let mut parts = Vec::new();
    for m in [2u32, 3] {
        let model = CtsModel::new(&h, m).unwrap();
        let pts: Vec<(f64, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&r| {
                let step = sum_matrix(&model.decompose(1.0 / r as f64).unwrap().reconstruct()).unwrap();
                let u = (0..r).fold(identity(8), |u, _| &step * u);
                (r as f64, spectral_norm(&(u - &exact)))
            })
            .collect();
        let s = slope(&pts);
        ensure(s <= -(m as f64) + SLOPE_SLACK, || format!("M={m}: slope {s:.3}"))?;
        parts.push(format!("M={m} slope {s:.2}"));
    }
    // μ is non-monotone while t|H|₁/r > 1, so monotonicity is checked from r = 5.
    let model = CtsModel::new(&h, 3).unwrap();
    let lambdas: Vec<f64> = (5..400).map(|r| model.lambda(1.0, r).unwrap()).collect();
    ensure(lambdas.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), || "λ(r) not monotone".into())?;
    let tail = model.lambda(1.0, 1_000_000).unwrap();
    ensure(tail - 1.0 < 1e-4, || format!("λ(1e6) = {tail}"))?;
    parts.push(format!("λ(r) decreasing, λ(1e6)−1 = {:.1e}", tail - 1.0));
    Ok(parts.join(", "))
}

/// `−(t²/2) Σ_{j<k} [H_j, H_k]` with `j < k` in gate application order.
fn commutator_form(h: &PauliSum, t: f64) -> CMatrix {
    let gates = product_formula(h, 1.0, 1).unwrap();
    let terms: Vec<CMatrix> = gates
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::PauliRotation { pauli, angle } => {
                Some(sum_matrix(&PauliSum::from_string(pauli, Complex64::from(angle / 2.0))).unwrap())
            }
            _ => None,
        })
        .collect();
    let d = 1 << h.n_qubits();
    let mut out = CMatrix::zeros(d, d);
    for j in 0..terms.len() {
        for k in j + 1..terms.len() {
            out += &terms[j] * &terms[k] - &terms[k] * &terms[j];
        }
    }
    out * Complex64::from(-t * t / 2.0)
}

fn enhanced_pf() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let h = random_hamiltonian(100 + seed, 1 + (seed as usize % 3));
        let t = 0.1 + 0.05 * seed as f64;
        let r = sum_matrix(&pf_remainder(&h, t, 1, 2).map_err(|e| e.to_string())?).unwrap();
        worst = worst.max(spectral_norm(&(r - commutator_form(&h, t))));
    }
    ensure(worst <= COMMUTATOR_TOL, || format!("O(t²) remainder deviates by {worst:e}"))?;
    let mut parts = vec![format!("O(t²) commutator deviation {worst:.1e}")];

    let h = tfim_hamiltonian(3, 1.0, 1.0).unwrap();
    let exact = expm_hermitian(&sum_matrix(&h).unwrap(), 1.0);
    for (p, m) in [(1u32, 3u32), (2, 4)] {
        let model = EnhancedModel::new(&h, p, m, m).unwrap();
        let pts: Vec<(f64, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&r| {
                let d = model.decompose(1.0 / r as f64).unwrap();
                let step = sequence_unitary(&d.base_formula, 3).unwrap() + sum_matrix(&d.correction_operator()).unwrap();
                let u = (0..r).fold(identity(8), |u, _| &step * u);
                (r as f64, spectral_norm(&(u - &exact)))
            })
            .collect();
        let s = slope(&pts);
        ensure(s <= -(m as f64) + SLOPE_FIT_TOL, || format!("p={p}: error slope {s:.3} > −{m}"))?;
        let pts: Vec<(f64, f64)> = [200u64, 400, 800, 1600]
            .iter()
            .map(|&r| (r as f64, model.lambda(1.0, r) - 1.0))
            .collect();
        let ls = slope(&pts);
        ensure((ls + p as f64).abs() <= SLOPE_SLACK, || format!("p={p}: λ−1 slope {ls:.3}"))?;
        parts.push(format!("p={p} error slope {s:.2}, λ−1 slope {ls:.2}"));
    }
    Ok(parts.join(", "))
}

fn markov_layering() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for seed in 0..40u64 {
        let mut rng = stream(seed, 99);
        let n = 1 + (seed as usize % 2);
        let paulis = all_paulis(n);
        let mut factor = || {
            let mut s = PauliSum::zero(n);
            for _ in 0..rng.random_range(1..=3) {
                let p = &paulis[rng.random_range(0..paulis.len())];
                s.add_term(p, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
            s.prune();
            s
        };
        let (f1, f2) = (factor(), factor());
        if f1.is_empty() || f2.is_empty() {
            continue;
        }
        let lp = LayeredProduct::new(Complex64::new(0.0, -0.5), &[(f1, 2), (f2, 2)]).map_err(|e| e.to_string())?;
        let full = lp.exact_expansion().map_err(|e| e.to_string())?;
        worst = worst.max(lp.enumerate_draws().sub(&full).unwrap().l1_norm());
        ensure(lp.l1_weight() >= full.l1_norm() - 1e-12, || format!("seed {seed}: layered L1 below full"))?;
        count += 1;
    }
    ensure(worst <= LAYERING_TOL, || format!("enumeration deviates by {worst:e}"))?;
    Ok(format!("{count} instances, max deviation {worst:.1e}, layered L1 ≥ full"))
}

fn resource_numbers() -> Outcome {
    let d15 = damping_comparison(8, 0.15).map_err(|e| e.to_string())?;
    let d05 = damping_comparison(8, 0.05).map_err(|e| e.to_string())?;
    ensure(d15.four_cnot_total == 56.0, || format!("four-CNOT total {}", d15.four_cnot_total))?;
    let stoch = format!("{:.1}", d15.stochastic_cnots);
    ensure(stoch == "3.7", || format!("stochastic CNOTs {stoch}"))?;
    let ovh = format!("{:.2}", d05.overhead);
    ensure(ovh == "1.98", || format!("overhead {ovh}"))?;
    let n1 = n1_expected(10_000, 2.0);
    ensure((n1 / 2f64.ln() - 1.0).abs() <= N1_REL_TOL, || format!("⟨N₁⟩ = {n1}"))?;
    for (l, t, e) in [(11.0, 6.0, 2e-6), (39.0, 20.0, 1e-3)] {
        let q = qdrift_gate_bound(l, t, e);
        ensure(q == 2.0 * l * l * t * t / e, || format!("qDRIFT bound {q}"))?;
    }
    let res = tfim_sweep(&SweepConfig::default()).map_err(|e| e.to_string())?;
    ensure(res.failures.is_empty(), || format!("{} sweep failures", res.failures.len()))?;
    let sizes: Vec<usize> = SweepConfig::default().sizes;
    for &n in &sizes {
        let qd = res
            .rows
            .iter()
            .find(|r| r.n == n && r.algorithm == Algorithm::Qdrift && r.constraint.value == 2e-6)
            .ok_or_else(|| format!("no qDRIFT row at n={n}"))?
            .cnot_count;
        for r in res.rows.iter().filter(|r| {
            r.n == n && matches!(r.algorithm, Algorithm::Cts | Algorithm::Pf1Enhanced | Algorithm::Pf2Enhanced)
        }) {
            ensure(r.cnot_count < qd, || format!("n={n} {}: {} ≥ qDRIFT {qd}", r.algorithm, r.cnot_count))?;
        }
    }
    let min_r2 = res.fits.iter().map(|f| f.r_squared).fold(f64::INFINITY, f64::min);
    ensure(min_r2 >= R2_MIN, || format!("min R² {min_r2}"))?;
    Ok(format!(
        "56 vs {stoch} CNOTs, overhead {ovh}, ⟨N₁⟩/ln2 = {:.5}, {} sweep rows n∈{:?}..{:?}, min R² {min_r2:.4}",
        n1 / 2f64.ln(),
        res.rows.len(),
        sizes.first().unwrap(),
        sizes.last().unwrap()
    ))
}

fn run_scu(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_scu"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!("scu {args:?} failed: {}", String::from_utf8_lossy(&status.stderr))
    })
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["ghz", "--n", "4", "--shots", "50", "--runs", "2", "--seed", "3"],
        &["estimate", "--sizes", "4,6", "--seed", "3"],
        &["compile", "--tfim-n", "3", "--t", "1", "--r", "6", "--seed", "3"],
        &["compile", "--tfim-n", "3", "--algorithm", "pf1_enhanced", "--r", "6", "--seed", "3"],
        &["channel-sample", "--samples", "200", "--observable", "1 X", "--shots", "20", "--seed", "3"],
    ];
    let mut files = 0;
    for args in commands {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        run_scu(args, a.path())?;
        run_scu(args, b.path())?;
        let mut names: Vec<_> = std::fs::read_dir(a.path())
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        ensure(names.len() >= 2, || format!("{args:?}: only {} outputs", names.len()))?;
        for name in names {
            let x = std::fs::read(a.path().join(&name)).map_err(|e| e.to_string())?;
            let y = std::fs::read(b.path().join(&name)).map_err(|e| format!("{name:?}: {e}"))?;
            ensure(x == y, || format!("{} {name:?} differs between runs", args[0]))?;
            files += 1;
        }
    }
    Ok(format!("{files} files byte-identical across 5 commands"))
}

fn report(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    match outcome {
        Ok(d) => {
            println!("PASS {name}: {d}");
            true
        }
        Err(d) => {
            println!("FAIL {name}: {d}");
            false
        }
    }
}

fn main() -> ExitCode {
    let shot = ghz_runs(1000, 5);
    let mut ok = true;
    ok &= report("ghz_fidelities", || ghz_fidelities(shot.as_ref().map_err(Clone::clone)?));
    ok &= report("mqc_signal", || mqc_signal(shot.as_ref().map_err(Clone::clone)?));
    ok &= report("scu_unbiasedness", unbiasedness);
    ok &= report("cts_taylor_reconstruction", cts_reconstruction);
    ok &= report("cts_error_scaling", cts_scaling);
    ok &= report("enhanced_pf", enhanced_pf);
    ok &= report("markov_layering", markov_layering);
    ok &= report("resource_numbers", resource_numbers);
    ok &= report("cli_determinism", determinism);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
