use scu::ghz::{
    analytic_fidelity, analytic_signal, default_theta_grid, exact_signal_and_population, exhaustive_circuit_signal,
    fourier_intensities, run_mqc_experiment, GhzExperimentConfig,
};

#[test]
fn exact_fidelities_at_eight_qubits() {
    for (p, printed) in [(0.0, 1.0), (0.05, 0.842), (0.15, 0.613)] {
        let r = run_mqc_experiment(&GhzExperimentConfig::new(8, p, 0, 1, 0)).unwrap();
        assert!((r.fidelity - analytic_fidelity(8, p)).abs() < 1e-10, "p={p}: {}", r.fidelity);
        assert!((r.fidelity - printed).abs() < 1e-3);
        for pt in &r.signal {
            assert!((pt.mean - analytic_signal(8, p, pt.theta)).abs() < 1e-10);
        }
    }
}

#[test]
fn circuit_route_agrees_at_four_qubits() {
    let grid = default_theta_grid(4);
    let (a, pa) = exhaustive_circuit_signal(4, 0.25, &grid).unwrap();
    let (b, pb) = exact_signal_and_population(4, 0.25, &grid).unwrap();
    for ((x, y), th) in a.iter().zip(&b).zip(&grid) {
        assert!((x - y).abs() < 1e-10);
        assert!((x - analytic_signal(4, 0.25, *th)).abs() < 1e-10);
    }
    assert!((pa - pb).abs() < 1e-10);
}

#[test]
fn intensities_are_symmetric() {
    let grid = default_theta_grid(6);
    let (s, _) = exact_signal_and_population(6, 0.3, &grid).unwrap();
    let im = fourier_intensities(&s, 6).unwrap();
    for (m, v) in &im {
        let mirror = im.iter().find(|(k, _)| *k == -m).unwrap().1;
        assert!((v - mirror).abs() < 1e-12);
        assert!(*v > -1e-12);
    }
    let i6 = im.iter().find(|(k, _)| *k == 6).unwrap().1;
    assert!((i6 - 0.25 * 0.7f64.powi(5)).abs() < 1e-12);
}

#[test]
fn shot_mode_tracks_the_analytic_fidelity() {
    let r = run_mqc_experiment(&GhzExperimentConfig::new(8, 0.15, 1000, 5, 7)).unwrap();
    assert!((r.fidelity - analytic_fidelity(8, 0.15)).abs() < 0.02, "{} ± {}", r.fidelity, r.fidelity_stderr);
    let within = r
        .signal
        .iter()
        .filter(|pt| (pt.mean - analytic_signal(8, 0.15, pt.theta)).abs() <= 4.0 * pt.stderr)
        .count();
    assert!(within as f64 >= 0.95 * r.signal.len() as f64);
}
