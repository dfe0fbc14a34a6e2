use proptest::prelude::*;

use scu::dense::{pauli_matrix, spectral_norm, sum_matrix};
use scu::pauli::{PauliString, PauliSum};
use scu::sim::{sequence_unitary, Gate, GateSequence};

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n), 0u8..4).prop_map(|(letters, phase)| {
        let s: String = letters.into_iter().collect();
        s.parse::<PauliString>().unwrap().with_phase(phase)
    })
}

proptest! {
    #[test]
    fn product_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let ab = a.mul(&b).unwrap();
        let want = pauli_matrix(&a).unwrap() * pauli_matrix(&b).unwrap();
        prop_assert!(spectral_norm(&(pauli_matrix(&ab).unwrap() - want)) < 1e-12);
    }

    #[test]
    fn commutation_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let (ma, mb) = (pauli_matrix(&a).unwrap(), pauli_matrix(&b).unwrap());
        let comm = &ma * &mb - &mb * &ma;
        prop_assert_eq!(a.commutes_with(&b), spectral_norm(&comm) < 1e-12);
    }

    #[test]
    fn sum_product_matches_dense(
        terms_a in prop::collection::vec((pauli_string(2), -1.0f64..1.0), 1..5),
        terms_b in prop::collection::vec((pauli_string(2), -1.0f64..1.0), 1..5),
    ) {
        let build = |ts: &[(PauliString, f64)]| {
            let mut s = PauliSum::zero(2);
            for (p, c) in ts {
                s.add_term(p, (*c).into());
            }
            s
        };
        let (a, b) = (build(&terms_a), build(&terms_b));
        let want = sum_matrix(&a).unwrap() * sum_matrix(&b).unwrap();
        let got = sum_matrix(&a.mul(&b).unwrap()).unwrap();
        prop_assert!(spectral_norm(&(got - want)) < 1e-10);
    }

    #[test]
    fn rotation_sequence_inverts(p in pauli_string(3), angle in -3.0f64..3.0) {
        let p = p.unphased();
        let seq = GateSequence::from(vec![
            Gate::H { qubit: 1 },
            Gate::PauliRotation { pauli: p, angle },
            Gate::Cnot { control: 0, target: 2 },
        ]);
        let u = sequence_unitary(&seq, 3).unwrap();
        let v = sequence_unitary(&seq.inverse().unwrap(), 3).unwrap();
        let id = nalgebra::DMatrix::identity(8, 8);
        prop_assert!(spectral_norm(&(v * u - id)) < 1e-12);
    }
}
