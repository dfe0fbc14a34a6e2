use std::fmt::Write as _;

use indexmap::IndexMap;
use num_complex::Complex64;
use rustc_hash::FxBuildHasher;

use super::string::PauliString;
use crate::error::{Result, ScuError};

/// Coefficients below this fraction of the largest coefficient magnitude are dropped.
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Sparse complex-weighted sum of Pauli strings.
///
/// Keys are unphased strings; any string phase is folded into its coefficient, so
/// a sum is Hermitian exactly when every coefficient is real. Iteration follows
/// insertion order, which keeps every derived quantity deterministic.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n_qubits: usize,
    terms: IndexMap<PauliString, Complex64, FxBuildHasher>,
}

impl PartialEq for PauliSum {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(k, v)| other.terms.get(k) == Some(v))
    }
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: IndexMap::default(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut s = PauliSum::zero(n_qubits);
        s.add_term(&PauliString::identity(n_qubits), Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_string(p: &PauliString, coeff: Complex64) -> Self {
        let mut s = PauliSum::zero(p.n_qubits());
        s.add_term(p, coeff);
        s
    }

    /// Collects `(coefficient, string)` pairs, merging like terms.
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut s = PauliSum::zero(n_qubits);
        for (c, p) in terms {
            if p.n_qubits() != n_qubits {
                return Err(ScuError::DimensionMismatch {
                    left: n_qubits,
                    right: p.n_qubits(),
                });
            }
            s.add_term(&p, c);
        }
        s.prune();
        Ok(s)
    }

    /// Parses `[(coeff, "XZI"), ...]` with real coefficients. Panics on malformed strings.
    pub fn from_real(terms: &[(f64, &str)]) -> Self {
        let parsed: Vec<(Complex64, PauliString)> = terms
            .iter()
            .map(|(c, s)| (Complex64::new(*c, 0.0), s.parse().expect("valid Pauli string")))
            .collect();
        let n = parsed.first().map(|(_, p)| p.n_qubits()).unwrap_or(1);
        PauliSum::from_terms(n, parsed).expect("consistent qubit counts")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(unphased string, coefficient)` in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        let c = self.terms.get(&p.unphased()).copied().unwrap_or_default();
        c * p.phase_factor().conj()
    }

    pub fn identity_coeff(&self) -> Complex64 {
        self.coeff(&PauliString::identity(self.n_qubits))
    }

    /// Adds `coeff · p` (the string phase is folded into the coefficient).
    pub fn add_term(&mut self, p: &PauliString, coeff: Complex64) {
        let c = coeff * p.phase_factor();
        if p.phase_exp() == 0 {
            *self.terms.entry(p.clone()).or_default() += c;
        } else {
            *self.terms.entry(p.unphased()).or_default() += c;
        }
    }

    /// Removes coefficients below [`DROP_TOLERANCE`] relative to the largest magnitude.
    pub fn prune(&mut self) {
        let max = self.max_abs();
        let cut = DROP_TOLERANCE * max;
        self.terms.retain(|_, c| c.norm() > cut && c.norm() > 0.0);
    }

    /// Removes coefficients with magnitude at most `cut`.
    pub(crate) fn retain_above(&mut self, cut: f64) {
        self.terms.retain(|_, c| c.norm() > cut);
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn scaled(&self, k: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out.prune();
        out
    }

    pub fn scaled_real(&self, k: f64) -> PauliSum {
        self.scaled(Complex64::new(k, 0.0))
    }

    fn check_dims(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(ScuError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// `self + k · other` without pruning.
    pub(crate) fn axpy_raw(&mut self, k: Complex64, other: &PauliSum) {
        for (p, c) in &other.terms {
            *self.terms.entry(p.clone()).or_default() += k * c;
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = self.clone();
        out.axpy_raw(Complex64::new(1.0, 0.0), other);
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = self.clone();
        out.axpy_raw(Complex64::new(-1.0, 0.0), other);
        out.prune();
        Ok(out)
    }

    /// Distributive product `self · other` with like-term collection and pruning.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        out.terms.reserve(self.len().max(other.len()));
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let prod = a.mul_unchecked(b);
                let c = ca * cb * prod.phase_factor();
                let key = if prod.phase_exp() == 0 { prod } else { prod.with_phase(0) };
                *out.terms.entry(key).or_default() += c;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Right-multiplies by a single string: `self · p`.
    pub fn mul_string(&self, p: &PauliString) -> Result<PauliSum> {
        if p.n_qubits() != self.n_qubits {
            return Err(ScuError::DimensionMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        let mut out = PauliSum::zero(self.n_qubits);
        out.terms.reserve(self.len());
        for (a, ca) in &self.terms {
            let prod = a.mul_unchecked(p);
            let c = ca * prod.phase_factor();
            *out.terms.entry(prod.with_phase(0)).or_default() += c;
        }
        Ok(out)
    }

    /// `AB − BA`; only anticommuting pairs contribute (`2·ab` each).
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.commutes_with(b) {
                    continue;
                }
                let prod = a.mul_unchecked(b);
                let c = ca * cb * prod.phase_factor() * 2.0;
                *out.terms.entry(prod.with_phase(0)).or_default() += c;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Hermitian conjugate (every unphased key is Hermitian).
    pub fn adjoint(&self) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Hermitian iff every coefficient is real within `tol` (absolute).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let tol = 1e-10 * self.max_abs().max(1.0);
        if !self.is_hermitian(tol) {
            return Err(ScuError::NotHermitian {
                max_imag: self.max_imag(),
            });
        }
        Ok(())
    }

    /// Plain-text form: one `(re,im) LETTERS` line per term, 17 significant digits.
    ///
    /// A zero sum is written as a single zero-coefficient identity line so the
    /// qubit count survives a round trip.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            let id = PauliString::identity(self.n_qubits);
            let _ = writeln!(out, "({:.16e},{:.16e}) {}", 0.0, 0.0, id.letters());
            return out;
        }
        for (p, c) in &self.terms {
            let _ = writeln!(out, "({:.16e},{:.16e}) {}", c.re, c.im, p.letters());
        }
        out
    }

    /// Parses the text form. Blank lines and `#` comments are ignored. Accepted
    /// coefficients: `(re,im)`, or a bare real number.
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut sum: Option<PauliSum> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (coeff, letters) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| ScuError::Parse(format!("line {}: expected '<coeff> <pauli>'", lineno + 1)))?;
            let c = parse_complex(coeff.trim())
                .map_err(|e| ScuError::Parse(format!("line {}: {e}", lineno + 1)))?;
            let p: PauliString = letters.parse()?;
            let s = sum.get_or_insert_with(|| PauliSum::zero(p.n_qubits()));
            if s.n_qubits != p.n_qubits() {
                return Err(ScuError::Parse(format!(
                    "line {}: string has {} qubits, expected {}",
                    lineno + 1,
                    p.n_qubits(),
                    s.n_qubits
                )));
            }
            s.add_term(&p, c);
        }
        let mut s = sum.ok_or_else(|| ScuError::Parse("no terms found".into()))?;
        s.terms.retain(|_, c| c.norm() > 0.0);
        Ok(s)
    }
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| format!("malformed complex '{s}'"))?;
        let re: f64 = re.trim().parse().map_err(|_| format!("bad real part '{re}'"))?;
        let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
        Ok(Complex64::new(re, im))
    } else {
        s.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("bad coefficient '{s}'"))
    }
}

/// `sum_mul` in free-function form.
pub fn sum_mul(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.mul(b)
}

pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.commutator(b)
}

pub fn l1_norm(a: &PauliSum) -> f64 {
    a.l1_norm()
}
