use nalgebra::DMatrix;
use num_complex::Complex64;

use scu::dense::{expm_hermitian, pauli_matrix, spectral_norm, sum_matrix, CMatrix};
use scu::hamsim::product_formula;
use scu::pauli::PauliSum;
use scu::resources::*;
use scu::sim::sequence_unitary;

#[test]
fn n1_limits() {
    assert!((n1_expected(10_000, 2.0) / 2f64.ln() - 1.0).abs() < 1e-3);
    for lambda in [1.5, 2.0, 20.0, 2000.0] {
        let r = (100.0 * f64::ln(lambda)).ceil() as u64;
        assert!((n1_expected(r, lambda) / lambda.ln() - 1.0).abs() < 0.01);
    }
    let mut prev = 0.0;
    for lambda in [1.0, 1.1, 2.0, 10.0, 100.0] {
        let v = n1_expected(50, lambda);
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn qdrift_bound_is_quadratic() {
    for (l, t, e) in [(1.0, 1.0, 2.0), (3.0, 7.0, 1e-3), (39.0, 20.0, 2e-6)] {
        let base = qdrift_gate_bound(l, t, e);
        assert_eq!(base, 2.0 * l * l * t * t / e);
        assert!((qdrift_gate_bound(2.0 * l, t, e) / base - 4.0).abs() < 1e-12);
        assert!((qdrift_gate_bound(l, 3.0 * t, e) / base - 9.0).abs() < 1e-12);
    }
    let h = tfim_hamiltonian(6, 1.0, 1.0).unwrap();
    assert_eq!(h.l1_norm(), 11.0);
    assert!((two_qubit_fraction(&h) - 5.0 / 11.0).abs() < 1e-15);
}

#[test]
fn damping_table_numbers() {
    let d = damping_comparison(8, 0.15).unwrap();
    assert_eq!(d.instances, 14);
    assert_eq!(d.four_cnot_total, 56.0);
    assert_eq!(format!("{:.1}", d.stochastic_cnots), "3.7");
    let d = damping_comparison(8, 0.05).unwrap();
    assert_eq!(format!("{:.2}", d.overhead), "1.98");
    assert!(damping_comparison(8, 1.5).is_err());
}

#[test]
fn diamond_bound_examples() {
    let x = pauli_matrix(&"X".parse().unwrap()).unwrap();
    let id = CMatrix::identity(2, 2);
    assert_eq!(diamond_norm_bound(&x, &[(1.0, x.clone())]).unwrap(), 0.0);
    // ‖X − I‖ = 2 (eigenvalue −2 on |−⟩).
    assert!((diamond_norm_bound(&x, &[(1.0, id.clone())]).unwrap() - 4.0).abs() < 1e-12);
    assert!(diamond_norm_bound(&x, &[(0.5, id.clone())]).is_err());

    // First-order formula at small t, against the directly computed unitary-channel distance
    // on a pure input: ‖UρU† − VρV†‖₁ ≤ 2‖U − V‖.
    let h = PauliSum::from_real(&[(1.0, "X"), (1.0, "Z")]);
    let t = 0.05;
    let u = expm_hermitian(&sum_matrix(&h).unwrap(), t);
    let v = sequence_unitary(&product_formula(&h, t, 1).unwrap(), 1).unwrap();
    let bound = diamond_norm_bound(&u, &[(1.0, v.clone())]).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..64 {
        let a = std::f64::consts::PI * k as f64 / 32.0;
        let psi = DMatrix::from_column_slice(2, 1, &[Complex64::new(a.cos(), 0.0), Complex64::new(0.0, a.sin())]);
        let rho = &psi * psi.adjoint();
        let diff = &u * &rho * u.adjoint() - &v * &rho * v.adjoint();
        worst = worst.max(diff.singular_values().iter().sum());
    }
    assert!(bound >= worst - 1e-12, "{bound} < {worst}");
    assert!(bound > 0.0 && spectral_norm(&(u - v)) > 0.0);
}

fn small_sweep() -> SweepConfig {
    SweepConfig {
        sizes: vec![4, 6, 8, 10],
        ..SweepConfig::default()
    }
}

#[test]
fn sweep_shapes_fits_and_ordering() {
    let res = tfim_sweep(&small_sweep()).unwrap();
    assert!(res.failures.is_empty(), "{:?}", res.failures);
    assert_eq!(res.rows.len(), 4 * 6 * 2);
    for f in &res.fits {
        assert!(f.r_squared >= 0.98, "{f:?}");
    }
    for row in &res.rows {
        assert!(row.r >= 1 && row.lambda >= 1.0 && row.cnot_count > 0.0);
        assert!((row.overhead - row.lambda * row.lambda).abs() <= 1e-12 * row.overhead);
        assert_eq!(row.t, row.n as f64);
    }
    for &n in &[4usize, 6, 8, 10] {
        let qd = res
            .rows
            .iter()
            .find(|r| r.n == n && r.algorithm == Algorithm::Qdrift && r.constraint.value == 2e-6)
            .unwrap()
            .cnot_count;
        for r in res.rows.iter().filter(|r| {
            r.n == n && matches!(r.algorithm, Algorithm::Cts | Algorithm::Pf1Enhanced | Algorithm::Pf2Enhanced)
        }) {
            assert!(r.cnot_count < qd, "{r:?} vs qdrift {qd}");
        }
    }
    assert_eq!(tfim_sweep(&small_sweep()).unwrap(), res);
}

#[test]
fn sweep_is_monotone_in_constraints() {
    let cfg = SweepConfig {
        sizes: vec![4, 8],
        epsilons: vec![1e-3, 1e-4, 1e-5, 1e-6],
        diamond_epsilons: vec![2e-3, 2e-4, 2e-6],
        lambda_maxes: vec![2000.0, 200.0, 20.0, 2.0],
        ..SweepConfig::default()
    };
    let res = tfim_sweep(&cfg).unwrap();
    for &n in &cfg.sizes {
        for a in Algorithm::ALL {
            let rows: Vec<_> = res.rows.iter().filter(|r| r.n == n && r.algorithm == a).collect();
            for w in rows.windows(2) {
                assert!(w[1].r >= w[0].r, "{:?} -> {:?}", w[0], w[1]);
                assert!(w[1].cnot_count >= w[0].cnot_count * (1.0 - 1e-12), "{:?} -> {:?}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn enhanced_cost_per_step_tracks_plain_formula() {
    let res = tfim_sweep(&SweepConfig {
        sizes: vec![6, 10],
        algorithms: vec![Algorithm::Pf1Enhanced, Algorithm::Pf2Enhanced],
        ..SweepConfig::default()
    })
    .unwrap();
    for row in &res.rows {
        let plain = match row.algorithm {
            Algorithm::Pf1Enhanced => cnot_convert(Algorithm::Pf1, row.n, row.r, 1.0),
            _ => cnot_convert(Algorithm::Pf2, row.n, row.r, 1.0),
        };
        let excess = row.cnot_count - plain;
        assert!(excess > 0.0);
        assert!(excess <= row.n as f64 * row.lambda.ln() * 1.01, "{row:?}");
        assert!(excess / plain < 0.05, "{row:?}");
    }
}

#[test]
fn boundary_sizes_and_validation() {
    let res = tfim_sweep(&SweepConfig {
        sizes: vec![2],
        time_factor: 1e-3,
        ..SweepConfig::default()
    })
    .unwrap();
    assert!(res.failures.is_empty());
    assert!(res.rows.iter().all(|r| r.r >= 1 && r.cnot_count.is_finite()));
    assert!(tfim_sweep(&SweepConfig {
        algorithms: vec![],
        ..SweepConfig::default()
    })
    .is_err());
    assert!(tfim_sweep(&SweepConfig {
        lambda_maxes: vec![1.0],
        ..SweepConfig::default()
    })
    .is_err());
}
