//! Dense-matrix images of Pauli objects for small registers.
//!
//! These are reference computations: they build matrices by Kronecker products
//! of the 2×2 Pauli matrices and never go through the symplectic product rule.
//! Basis index bit `q` is qubit `q`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, ScuError};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub type CMatrix = DMatrix<Complex64>;

/// Largest register for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(ScuError::OversizeDense {
            max: MAX_DENSE_QUBITS,
            got: n,
        });
    }
    Ok(())
}

pub fn single_matrix(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn pauli_matrix(p: &PauliString) -> Result<CMatrix> {
    let n = p.n_qubits();
    check_size(n)?;
    // Most significant factor is the highest qubit.
    let mut m = CMatrix::from_element(1, 1, p.phase_factor());
    for q in (0..n).rev() {
        m = m.kronecker(&single_matrix(p.get(q)));
    }
    Ok(m)
}

pub fn sum_matrix(s: &PauliSum) -> Result<CMatrix> {
    let n = s.n_qubits();
    check_size(n)?;
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for (p, coeff) in s.iter() {
        m += pauli_matrix(p)? * *coeff;
    }
    Ok(m)
}

/// Every unphased n-qubit Pauli string, in base-4 order over qubits.
pub fn all_paulis(n: usize) -> Vec<PauliString> {
    let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut f = Vec::with_capacity(n);
            for _ in 0..n {
                f.push(letters[k % 4]);
                k /= 4;
            }
            PauliString::from_paulis(&f)
        })
        .collect()
}

/// Pauli expansion of a dense operator via `c_P = Tr(P M) / 2^n`.
pub fn pauli_decompose(m: &CMatrix) -> Result<PauliSum> {
    let d = m.nrows();
    if d != m.ncols() || !d.is_power_of_two() {
        return Err(ScuError::InvalidParameter(format!(
            "expected a square 2^n matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = d.trailing_zeros() as usize;
    if n > 6 {
        return Err(ScuError::OversizeDense { max: 6, got: n });
    }
    let terms = all_paulis(n)
        .into_iter()
        .map(|p| {
            let pm = pauli_matrix(&p)?;
            let tr = (pm * m).trace() / d as f64;
            Ok((tr, p))
        })
        .collect::<Result<Vec<_>>>()?;
    PauliSum::from_terms(n, terms)
}

/// `exp(-iHt)` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|e| Complex64::from_polar(1.0, -e * t));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(amps: &[Complex64]) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(amps);
    &v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_matrix_is_i_x_z() {
        let x = single_matrix(Pauli::X);
        let z = single_matrix(Pauli::Z);
        let y = single_matrix(Pauli::Y);
        assert!(max_abs_diff(&(x * z * c(0.0, 1.0)), &y) < 1e-15);
    }

    #[test]
    fn qubit_zero_is_least_significant_bit() {
        // X on qubit 0 maps |00> (index 0) to |01> (index 1).
        let m = pauli_matrix(&"XI".parse().unwrap()).unwrap();
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert_eq!(m[(2, 0)], c(0.0, 0.0));
    }

    #[test]
    fn decompose_round_trip() {
        let s = PauliSum::from_terms(
            2,
            [
                (c(0.5, -0.25), "XY".parse().unwrap()),
                (c(-1.0, 0.0), "ZI".parse().unwrap()),
            ],
        )
        .unwrap();
        let back = pauli_decompose(&sum_matrix(&s).unwrap()).unwrap();
        assert!(back.sub(&s).unwrap().l1_norm() < 1e-14);
    }

    #[test]
    fn oversize_is_rejected() {
        assert!(matches!(
            pauli_matrix(&PauliString::identity(13)),
            Err(ScuError::OversizeDense { .. })
        ));
    }

    #[test]
    fn hermitian_exponential() {
        let h = pauli_matrix(&"X".parse().unwrap()).unwrap();
        let t = 0.3_f64;
        let u = expm_hermitian(&h, t);
        assert!((u[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - c(0.0, -t.sin())).norm() < 1e-14);
    }
}
