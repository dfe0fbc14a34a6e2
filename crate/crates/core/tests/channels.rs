use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use scu::channel::{convex_decompose, KrausChannel};
use scu::dense::{max_abs_diff, projector, CMatrix};
use scu::pauli::PauliSum;
use scu::rng::stream;
use scu::sim::{exact_channel_apply, scu_estimate, scu_exact_expectation, dense_expectation, Gate, GateSequence, StateVector};

/// Kraus operators from the blocks of a random isometry `C^d → C^{kd}`.
fn random_channel(seed: u64) -> KrausChannel {
    let mut rng = stream(seed, 1);
    let n = 1 + (seed as usize % 3);
    let d = 1usize << n;
    let k = rng.random_range(1..=3usize);
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
    let pure = projector(&amps);
    let mix = CMatrix::identity(1 << n, 1 << n) / Complex64::from((1 << n) as f64);
    pure * Complex64::from(0.7) + mix * Complex64::from(0.3)
}

#[test]
fn weighted_terms_reproduce_kraus_application() {
    for seed in 0..50u64 {
        let ch = random_channel(seed);
        let n = ch.n_qubits();
        let dec = convex_decompose(&ch).unwrap();
        let total: f64 = (0..dec.n_terms()).map(|i| dec.term_prob(i)).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let rho = random_state(seed, n);
        let diff = max_abs_diff(&dec.apply_dense(&rho).unwrap(), &exact_channel_apply(&ch, &rho).unwrap());
        assert!(diff < 1e-10, "seed {seed}: {diff}");
    }
}

#[test]
fn circuit_level_terms_match_dense_channel() {
    let prep = GateSequence::from(vec![
        Gate::H { qubit: 0 },
        Gate::Cnot { control: 0, target: 1 },
        Gate::Phase { qubit: 1, angle: 0.4 },
    ]);
    let psi = StateVector::prepared(2, &prep).unwrap();
    let rho = projector(psi.amplitudes());
    let obs = PauliSum::from_real(&[(0.5, "ZI"), (-0.3, "XY"), (0.2, "YY")]);
    for seed in [1u64, 4, 7, 10] {
        let ch = random_channel(seed);
        assert_eq!(ch.n_qubits(), 2);
        let dec = convex_decompose(&ch).unwrap();
        let want = dense_expectation(&obs, &exact_channel_apply(&ch, &rho).unwrap()).unwrap();
        let got = scu_exact_expectation(&dec, &prep, &obs).unwrap();
        assert!((got - want).abs() < 1e-10, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn sampled_estimate_is_unbiased() {
    let ch = KrausChannel::amplitude_damping(0.3).unwrap();
    let dec = convex_decompose(&ch).unwrap();
    let prep = GateSequence::from(vec![Gate::H { qubit: 0 }]);
    let rho = projector(StateVector::prepared(1, &prep).unwrap().amplitudes());
    for obs in [PauliSum::from_real(&[(1.0, "X")]), PauliSum::from_real(&[(1.0, "Z")])] {
        let want = dense_expectation(&obs, &exact_channel_apply(&ch, &rho).unwrap()).unwrap();
        let est = scu_estimate(&dec, &prep, &obs, 20_000, 0, 5).unwrap();
        assert!((est.mean - want).abs() < 5.0 * est.std_error + 1e-12, "{} vs {want}", est.mean);
    }
}
