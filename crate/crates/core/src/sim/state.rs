use num_complex::Complex64;

use super::gate::{Gate, GateSequence};
use crate::dense::CMatrix;
use crate::error::{Result, ScuError};
use crate::pauli::{i_pow, PauliString, PauliSum};

/// Largest register the state-vector simulator accepts.
pub const MAX_STATE_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// `(x, z, phase)` of a string, valid for registers of at most 64 qubits.
fn masks(p: &PauliString) -> (usize, usize, u8) {
    let (x, z) = p.low_masks();
    (x as usize, z as usize, p.phase_exp())
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(ScuError::OversizeDense {
                max: MAX_STATE_QUBITS,
                got: n_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(ScuError::InvalidParameter(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits > MAX_STATE_QUBITS {
            return Err(ScuError::OversizeDense {
                max: MAX_STATE_QUBITS,
                got: n_qubits,
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Runs `seq` on `|0…0⟩`.
    pub fn prepared(n_qubits: usize, seq: &GateSequence) -> Result<Self> {
        let mut s = StateVector::new(n_qubits)?;
        s.apply(seq)?;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(ScuError::QubitOutOfRange {
                index: q,
                size: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() > self.n_qubits {
            return Err(ScuError::DimensionMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(())
    }

    pub fn apply(&mut self, seq: &GateSequence) -> Result<()> {
        for g in seq.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match g {
            Gate::H { qubit } | Gate::AncillaXMeasure { qubit } => {
                self.check_qubit(*qubit)?;
                let bit = 1 << qubit;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = (a + b) * s;
                        self.amps[i | bit] = (a - b) * s;
                    }
                }
            }
            Gate::X { qubit } => {
                self.check_qubit(*qubit)?;
                let bit = 1 << qubit;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(*control)?;
                self.check_qubit(*target)?;
                if control == target {
                    return Err(ScuError::InvalidParameter("cnot control equals target".into()));
                }
                let (cb, tb) = (1 << control, 1 << target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Phase { qubit, angle } => {
                self.check_qubit(*qubit)?;
                let bit = 1 << qubit;
                let ph = Complex64::from_polar(1.0, *angle);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= ph;
                    }
                }
            }
            Gate::Pauli { pauli } => {
                self.check_pauli(pauli)?;
                self.pauli_masked(pauli, 0, 0);
            }
            Gate::ControlledPauli { control, pauli } => {
                self.check_qubit(*control)?;
                self.check_pauli(pauli)?;
                let cb = 1 << control;
                self.pauli_masked(pauli, cb, cb);
            }
            Gate::PauliRotation { pauli, angle } => {
                self.check_pauli(pauli)?;
                self.rotation_masked(pauli, *angle, 0, 0)?;
            }
            Gate::ControlledPauliRotation {
                control,
                pauli,
                angle,
            } => {
                self.check_qubit(*control)?;
                self.check_pauli(pauli)?;
                let cb = 1 << control;
                self.rotation_masked(pauli, *angle, cb, cb)?;
            }
        }
        Ok(())
    }

    /// Coefficient `f(b)` with `P|b⟩ = f(b)|b ⊕ x⟩`.
    #[inline]
    fn pauli_factor(base: Complex64, z: usize, b: usize) -> Complex64 {
        if (z & b).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    /// Applies `P` to the amplitudes whose index satisfies `i & mask == val`.
    fn pauli_masked(&mut self, p: &PauliString, mask: usize, val: usize) {
        let (x, z, ph) = masks(p);
        let base = i_pow(ph as i64 + p.y_count() as i64);
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                if b & mask == val {
                    *a *= Self::pauli_factor(base, z, b);
                }
            }
            return;
        }
        for b in 0..self.amps.len() {
            let b2 = b ^ x;
            if b < b2 && b & mask == val {
                let (a, a2) = (self.amps[b], self.amps[b2]);
                self.amps[b2] = Self::pauli_factor(base, z, b) * a;
                self.amps[b] = Self::pauli_factor(base, z, b2) * a2;
            }
        }
    }

    /// `exp(−iθP/2)` on the amplitudes whose index satisfies `i & mask == val`.
    fn rotation_masked(&mut self, p: &PauliString, angle: f64, mask: usize, val: usize) -> Result<()> {
        if p.phase_exp() % 2 == 1 {
            return Err(ScuError::NotHermitian { max_imag: 1.0 });
        }
        let (x, z, ph) = masks(p);
        let base = i_pow(ph as i64 + p.y_count() as i64);
        let c = Complex64::new((angle / 2.0).cos(), 0.0);
        let ms = Complex64::new(0.0, -(angle / 2.0).sin());
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                if b & mask == val {
                    *a *= c + ms * Self::pauli_factor(base, z, b);
                }
            }
            return Ok(());
        }
        for b in 0..self.amps.len() {
            let b2 = b ^ x;
            if b < b2 && b & mask == val {
                let (a, a2) = (self.amps[b], self.amps[b2]);
                self.amps[b] = c * a + ms * Self::pauli_factor(base, z, b2) * a2;
                self.amps[b2] = c * a2 + ms * Self::pauli_factor(base, z, b) * a;
            }
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`, phase included.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        self.check_pauli(p)?;
        let (x, z, ph) = masks(p);
        let base = i_pow(ph as i64 + p.y_count() as i64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            acc += self.amps[b ^ x].conj() * Self::pauli_factor(base, z, b) * a;
        }
        Ok(acc)
    }

    pub fn expectation(&self, o: &PauliSum) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, c) in o.iter() {
            acc += c * self.expectation_pauli(p)?;
        }
        Ok(acc)
    }
}

/// Dense unitary of `seq` on `n_qubits`, column `j` being the image of basis state `j`.
pub fn sequence_unitary(seq: &GateSequence, n_qubits: usize) -> Result<CMatrix> {
    if n_qubits > crate::dense::MAX_DENSE_QUBITS {
        return Err(ScuError::OversizeDense {
            max: crate::dense::MAX_DENSE_QUBITS,
            got: n_qubits,
        });
    }
    let d = 1 << n_qubits;
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[j] = Complex64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps)?;
        s.apply(seq)?;
        for (i, a) in s.amplitudes().iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    Ok(m)
}
