use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{Result, ScuError};

pub(crate) type Words = SmallVec<[u64; 2]>;

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic bit pair `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// An n-qubit Pauli operator `i^phase · σ_0 ⊗ σ_1 ⊗ ... ⊗ σ_{n-1}` in symplectic form.
///
/// Qubit `q` is stored in bit `q % 64` of word `q / 64` of the `x` and `z` masks.
/// The bit pair `(1, 1)` denotes the Hermitian Pauli `Y = [[0, -i], [i, 0]]`, so
/// the unphased operator on every qubit is one of the four Hermitian Paulis and
/// `phase` alone carries any non-Hermitian prefactor. Internally the product rule
/// uses `Y = i·X·Z`; multiplying out `i^{x·z} X^x Z^z` factors gives the phase
/// update in [`PauliString::mul`].
///
/// In a state vector, qubit `q` corresponds to bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: Words,
    z: Words,
    phase: u8,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliString {
            n_qubits,
            x: smallvec![0; w],
            z: smallvec![0; w],
            phase: 0,
        }
    }

    /// Builds a string from per-qubit factors (`factors[q]` acts on qubit `q`).
    pub fn from_paulis(factors: &[Pauli]) -> Self {
        let mut p = PauliString::identity(factors.len());
        for (q, f) in factors.iter().enumerate() {
            p.set(q, *f);
        }
        p
    }

    /// A single Pauli factor on `qubit` of an `n_qubits` register.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        assert!(qubit < n_qubits, "qubit {qubit} out of range for {n_qubits} qubits");
        let mut p = PauliString::identity(n_qubits);
        p.set(qubit, pauli);
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Global phase exponent `k` of the prefactor `i^k`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> Complex64 {
        i_pow(self.phase as i64)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Copy with the phase reset to zero (the Hermitian representative).
    pub fn unphased(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn negated(&self) -> Self {
        let p = self.phase;
        self.clone().with_phase(p + 2)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let (w, b) = (qubit / 64, qubit % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        assert!(qubit < self.n_qubits);
        let (w, b) = (qubit / 64, qubit % 64);
        let (x, z) = pauli.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|w| *w == 0)
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| self.get(q) != Pauli::I)
            .collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len().min(other.x.len()) {
            parity += (self.x[w] & other.z[w]).count_ones();
            parity += (self.z[w] & other.x[w]).count_ones();
        }
        parity.is_multiple_of(2)
    }

    /// Low 64 bits of the `(x, z)` masks; the simulator uses these for registers up to 64 qubits.
    pub fn low_masks(&self) -> (u64, u64) {
        (self.x[0], self.z[0])
    }

    /// Number of qubits carrying a `Y` factor.
    pub fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    /// Same operator on a larger register (identity on the added qubits).
    pub fn widened(&self, n_qubits: usize) -> Self {
        assert!(n_qubits >= self.n_qubits);
        let w = words_for(n_qubits);
        let mut out = self.clone();
        out.n_qubits = n_qubits;
        out.x.resize(w, 0);
        out.z.resize(w, 0);
        out
    }

    /// Places a one-qubit string onto `qubit` of an `n_qubits` register, keeping its phase.
    pub fn placed(&self, n_qubits: usize, qubit: usize) -> Self {
        assert_eq!(self.n_qubits, 1, "placed() expects a single-qubit string");
        PauliString::single(n_qubits, qubit, self.get(0)).with_phase(self.phase)
    }

    /// Exact product `self · other`, tracking the phase modulo 4.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(ScuError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let mut e = self.phase as i64 + other.phase as i64;
        let mut x: Words = SmallVec::with_capacity(self.x.len());
        let mut z: Words = SmallVec::with_capacity(self.x.len());
        for w in 0..self.x.len() {
            let (ax, az, bx, bz) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (cx, cz) = (ax ^ bx, az ^ bz);
            e += (ax & az).count_ones() as i64 + (bx & bz).count_ones() as i64;
            e += 2 * (az & bx).count_ones() as i64;
            e -= (cx & cz).count_ones() as i64;
            x.push(cx);
            z.push(cz);
        }
        PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: e.rem_euclid(4) as u8,
        }
    }

    /// Hermitian conjugate: the unphased part is Hermitian, so only the phase flips.
    pub fn adjoint(&self) -> PauliString {
        let p = (4 - self.phase) & 3;
        self.clone().with_phase(p)
    }

    pub fn letters(&self) -> String {
        (0..self.n_qubits).map(|q| self.get(q).letter()).collect()
    }
}

pub(crate) fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Product of two Pauli strings with phase tracking.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

impl fmt::Display for PauliString {
    /// Phase prefix (`""`, `"i"`, `"-"`, `"-i"`) followed by one letter per qubit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = ScuError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(ScuError::Parse(format!("empty Pauli string '{s}'")));
        }
        let factors = body
            .chars()
            .map(|c| {
                Pauli::from_letter(c)
                    .ok_or_else(|| ScuError::Parse(format!("invalid Pauli letter '{c}' in '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_paulis(&factors).with_phase(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
